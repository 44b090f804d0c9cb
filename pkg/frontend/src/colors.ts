/** Stable per-category colors derived from taxonomy order. */

import type { TaxonomyEntry } from "./types.js";

// First entries match the traditional orange/green/blue report palette;
// the rest are evenly spaced hues so any taxonomy size stays readable.
const BASE_PALETTE = ["#f28522", "#2ca02c", "#1f77b4", "#d62728", "#9467bd", "#8c564b"];

export function categoryColors(taxonomy: readonly TaxonomyEntry[]): Map<string, string> {
  const colors = new Map<string, string>();
  for (const entry of taxonomy) {
    if (!colors.has(entry.report_category)) {
      const i = colors.size;
      const color =
        i < BASE_PALETTE.length
          ? BASE_PALETTE[i]
          : `hsl(${Math.round((i * 137.508) % 360)}, 65%, 45%)`;
      colors.set(entry.report_category, color);
    }
  }
  return colors;
}

/** Color for a class id: its category's color, grey for unknown classes. */
export function classColor(
  classId: number,
  taxonomy: readonly TaxonomyEntry[],
  colors: Map<string, string>,
): string {
  const entry = taxonomy.find((t) => t.class_id === classId);
  if (!entry) return "#888888";
  return colors.get(entry.report_category) ?? "#888888";
}
