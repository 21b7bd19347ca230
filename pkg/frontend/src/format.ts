// Numbers are displayed exactly as the API sent them: String(n) reproduces
// the JSON literal for any double, so intercepted-traffic checks can match
// every rendered digit against a response body. No rounding, no math.

export function verbatim(value: number | null | undefined): string {
  if (value === null || value === undefined) return "n/a";
  return String(value);
}

export function pct(value: number | null | undefined): string {
  if (value === null || value === undefined) return "n/a";
  return `${String(value)} %`;
}
