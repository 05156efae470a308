import { describe, expect, it } from "vitest";

import { fitSlope, labelFor } from "../src/slopes.js";

describe("fitSlope", () => {
  it("recovers exact power laws to 1e-12", () => {
    const h = [0.4, 0.2, 0.1, 0.05];
    for (const p of [0.5, 1, 2, 3.5]) {
      const err = h.map((x) => 7.3 * Math.pow(x, p));
      expect(Math.abs(fitSlope(h, err) - p)).toBeLessThan(1e-12);
    }
  });

  it("averages over noisy data", () => {
    const h = [0.4, 0.2, 0.1, 0.05];
    const err = h.map((x, i) => Math.pow(x, 2) * (i % 2 === 0 ? 1.1 : 0.9));
    const slope = fitSlope(h, err);
    expect(slope).toBeGreaterThan(1.5);
    expect(slope).toBeLessThan(2.5);
  });

  it("requires two samples", () => {
    expect(() => fitSlope([0.1], [1.0])).toThrow();
  });
});

describe("labelFor", () => {
  it("reads the degree from the file name", () => {
    expect(labelFor("out/example1_m3.csv", 0)).toBe("m=3");
    expect(labelFor("table.csv", 1)).toBe("series 2");
  });
});
