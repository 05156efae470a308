import { describe, expect, it } from "vitest";

import { CSV_HEADER, parseTable, SchemaError, writeTable } from "../src/csv.js";

const SAMPLE = `h,dofs,energy_err,dg_err,l2_err,eoc_energy,eoc_l2,assemble_ms,solve_ms
0.28284271247461928,166,4.9575096169546562,1.0310399112117565,0.043488316746669871,,,662.9,1.27
0.14142135623730964,726,2.3106113084508353,0.44567225837020186,0.0064789758758268647,1.1013409813718011,2.7467901779907571,2223.4,5.78
`;

describe("schema round trip", () => {
  it("parses and re-serializes without losing values", () => {
    const rows = parseTable(SAMPLE);
    expect(rows).toHaveLength(2);
    expect(rows[0].eoc_energy).toBeNull();
    expect(rows[1].dofs).toBe(726);
    const text = writeTable(rows);
    const again = parseTable(text);
    expect(again).toEqual(rows);
    // doubles survive exactly through the 17-digit format
    expect(again[0].h).toBe(0.28284271247461928);
    expect(again[1].l2_err).toBe(0.0064789758758268647);
  });

  it("keeps the exact header", () => {
    const text = writeTable(parseTable(SAMPLE));
    expect(text.split("\n")[0]).toBe(CSV_HEADER.join(","));
  });
});

describe("schema validation", () => {
  it("rejects a wrong header", () => {
    expect(() => parseTable("h,err\n0.1,1.0\n")).toThrow(SchemaError);
  });

  it("rejects non-numeric cells", () => {
    const bad = SAMPLE.replace("726", "many");
    expect(() => parseTable(bad)).toThrow(SchemaError);
  });

  it("rejects empty tables", () => {
    expect(() => parseTable("")).toThrow(SchemaError);
    expect(() => parseTable(SAMPLE.split("\n")[0] + "\n")).toThrow(SchemaError);
  });

  it("rejects non-decreasing h", () => {
    const lines = SAMPLE.trim().split("\n");
    const swapped = [lines[0], lines[2], lines[1]].join("\n");
    expect(() => parseTable(swapped)).toThrow(SchemaError);
  });

  it("rejects empty required cells", () => {
    const bad = SAMPLE.replace("4.9575096169546562", "");
    expect(() => parseTable(bad)).toThrow(SchemaError);
  });
});
