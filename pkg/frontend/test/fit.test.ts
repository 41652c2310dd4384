import { describe, expect, it } from "vitest";
import { linearFit } from "../src/fit";

describe("linear fit", () => {
  it("recovers an exact line", () => {
    const x = [0.05, 0.1, 0.2, 0.4];
    const y = x.map((v) => 2.0 - 0.3 * v);
    const f = linearFit(x, y);
    expect(f.intercept).toBeCloseTo(2.0, 12);
    expect(f.slope).toBeCloseTo(-0.3, 12);
    expect(f.maxResidual).toBeLessThan(1e-12);
  });

  it("matches the hand-computed intercept for the exact limit ratios", () => {
    // r(delta) = 2*sqrt(1 - delta^2/4) on {0.4, 0.2, 0.1, 0.05}
    const x = [0.4, 0.2, 0.1, 0.05];
    const y = x.map((d) => 2 * Math.sqrt(1 - (d * d) / 4));
    const f = linearFit(x, y);
    expect(f.intercept).toBeCloseTo(2.0085418797759784, 10);
  });

  it("rejects degenerate input", () => {
    expect(() => linearFit([1], [2])).toThrow();
    expect(() => linearFit([1, 1], [2, 3])).toThrow();
  });
});
