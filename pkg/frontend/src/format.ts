// Display formatting only. The console never computes a gain itself:
// every number on screen is an API value passed through these fixed
// formatters, so what is displayed is exactly the API value at the
// console's display precision.

export const GAIN_DECIMALS = 4;

export function fmtGain(value: number): string {
  return value.toFixed(GAIN_DECIMALS);
}

export function fmtObserved(value: number | string): string {
  return typeof value === "number" ? String(value) : value;
}

export function verdictClass(verdict: string): string {
  switch (verdict) {
    case "AsExpected":
      return "verdict-expected";
    case "Unexpected":
      return "verdict-unexpected";
    default:
      return "verdict-violation";
  }
}
