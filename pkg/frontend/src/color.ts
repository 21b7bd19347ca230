// Presentation-only color helpers (interpolation never reaches the screen
// as a number).

export const INFEASIBLE_FILL = "#3d3d3d";

export function valueColor(t: number): string {
  // light yellow to deep blue
  const clamped = Math.max(0, Math.min(1, t));
  const r = Math.round(255 - 195 * clamped);
  const g = Math.round(237 - 130 * clamped);
  const b = Math.round(160 + 60 * clamped);
  return `rgb(${r},${g},${b})`;
}

export function scColor(t: number): string {
  // grey toward saturated green as cohesion rises
  const clamped = Math.max(0, Math.min(1, t));
  const r = Math.round(200 - 160 * clamped);
  const g = Math.round(200 - 30 * clamped);
  const b = Math.round(200 - 160 * clamped);
  return `rgb(${r},${g},${b})`;
}

export function normalize(value: number, lo: number, hi: number): number {
  if (hi <= lo) return 0.5;
  return (value - lo) / (hi - lo);
}
