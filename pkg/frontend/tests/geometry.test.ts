import { describe, expect, it } from "vitest";

import { dragToRect, hitTest, inBounds, moveWithin } from "../src/geometry.js";

const W = 1920;
const H = 1480;

describe("dragToRect", () => {
  it("turns a forward drag into the enclosed box", () => {
    expect(dragToRect(100, 100, 150, 140, W, H)).toEqual({ x: 100, y: 100, w: 50, h: 40 });
  });

  it("normalizes a reversed drag to the same box", () => {
    expect(dragToRect(150, 140, 100, 100, W, H)).toEqual({ x: 100, y: 100, w: 50, h: 40 });
  });

  it("normalizes drags reversed on one axis only", () => {
    expect(dragToRect(150, 100, 100, 140, W, H)).toEqual({ x: 100, y: 100, w: 50, h: 40 });
    expect(dragToRect(100, 140, 150, 100, W, H)).toEqual({ x: 100, y: 100, w: 50, h: 40 });
  });

  it("clamps a drag that runs past the right edge to the image width", () => {
    expect(dragToRect(1900, 10, 2050, 60, W, H)).toEqual({ x: 1900, y: 10, w: 20, h: 50 });
  });

  it("clamps a drag that starts above the top edge", () => {
    expect(dragToRect(10, -30, 60, 40, W, H)).toEqual({ x: 10, y: 0, w: 50, h: 40 });
  });

  it("discards degenerate drags under the minimum side", () => {
    expect(dragToRect(100, 100, 101, 140, W, H)).toBeNull();
    expect(dragToRect(100, 100, 140, 101, W, H)).toBeNull();
    expect(dragToRect(100, 100, 100, 100, W, H)).toBeNull();
  });

  it("discards drags whose in-image part is degenerate", () => {
    expect(dragToRect(-50, 10, 1, 60, W, H)).toBeNull();
  });

  it("rounds fractional event coordinates to integer pixels", () => {
    expect(dragToRect(99.6, 100.4, 150.2, 139.7, W, H)).toEqual({
      x: 100,
      y: 100,
      w: 50,
      h: 40,
    });
  });

  it("always lands inside the image for scattered drags", () => {
    let seed = 12345;
    const rand = () => {
      seed = (seed * 1103515245 + 12345) % 2147483648;
      return seed / 2147483648;
    };
    for (let i = 0; i < 500; i++) {
      const x0 = rand() * 800 - 100;
      const y0 = rand() * 700 - 100;
      const x1 = rand() * 800 - 100;
      const y1 = rand() * 700 - 100;
      const rect = dragToRect(x0, y0, x1, y1, 640, 480);
      if (rect !== null) {
        expect(inBounds(rect, 640, 480)).toBe(true);
        expect(Number.isInteger(rect.x) && Number.isInteger(rect.y)).toBe(true);
        expect(Number.isInteger(rect.w) && Number.isInteger(rect.h)).toBe(true);
      }
    }
  });
});

describe("moveWithin", () => {
  const rect = { x: 10, y: 10, w: 30, h: 20 };

  it("applies an in-range shift", () => {
    expect(moveWithin(rect, 5, -3, 640, 480)).toEqual({ x: 15, y: 7, w: 30, h: 20 });
  });

  it("clamps at the top-left corner", () => {
    expect(moveWithin(rect, -100, -100, 640, 480)).toEqual({ x: 0, y: 0, w: 30, h: 20 });
  });

  it("clamps at the bottom-right corner keeping the box inside", () => {
    expect(moveWithin(rect, 10000, 10000, 640, 480)).toEqual({
      x: 610,
      y: 460,
      w: 30,
      h: 20,
    });
  });
});

describe("hitTest", () => {
  const rects = [
    { x: 0, y: 0, w: 100, h: 100 },
    { x: 50, y: 50, w: 100, h: 100 },
  ];

  it("returns the topmost (last drawn) box under the point", () => {
    expect(hitTest(rects, 75, 75)).toBe(1);
  });

  it("falls through to lower boxes outside the top one", () => {
    expect(hitTest(rects, 10, 10)).toBe(0);
  });

  it("returns -1 on empty space", () => {
    expect(hitTest(rects, 300, 300)).toBe(-1);
  });

  it("treats box extents as half-open", () => {
    expect(hitTest([{ x: 0, y: 0, w: 10, h: 10 }], 10, 5)).toBe(-1);
    expect(hitTest([{ x: 0, y: 0, w: 10, h: 10 }], 9, 9)).toBe(0);
  });
});
