/** Typed client for the annotation REST API. */

import type { FramePayload, ManifestPayload, WireBox } from "./types.js";

/** A save raced another writer; reload the frame to get currentVersion. */
export class ConflictError extends Error {
  constructor(public readonly currentVersion: number) {
    super(`frame changed on the server (now version ${currentVersion})`);
    this.name = "ConflictError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path);
    if (!response.ok) {
      throw new Error(`GET ${path} failed: ${response.status}`);
    }
    return (await response.json()) as T;
  }

  manifest(): Promise<ManifestPayload> {
    return this.getJson<ManifestPayload>("/api/manifest");
  }

  frame(index: number): Promise<FramePayload> {
    return this.getJson<FramePayload>(`/api/frames/${index}`);
  }

  imageUrl(index: number): string {
    return `${this.baseUrl}/api/images/${index}`;
  }

  /**
   * Replace a frame's boxes. Resolves to the new version; rejects with
   * ConflictError when the given version is stale (the server keeps its
   * current state, so nothing is lost).
   */
  async saveBoxes(index: number, boxes: WireBox[], version: number): Promise<number> {
    const response = await this.fetchFn(`${this.baseUrl}/api/frames/${index}/boxes`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ boxes, version }),
    });
    if (response.status === 409) {
      const body = (await response.json()) as {
        detail?: { current_version?: number };
      };
      throw new ConflictError(body.detail?.current_version ?? version + 1);
    }
    if (!response.ok) {
      const text = await response.text();
      throw new Error(`save failed (${response.status}): ${text}`);
    }
    const body = (await response.json()) as { version: number };
    return body.version;
  }
}
