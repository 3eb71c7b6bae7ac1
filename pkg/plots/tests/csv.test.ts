import { mkdtempSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { fileURLToPath } from "url";
import { describe, expect, it } from "vitest";
import { column, readNumericCsv } from "../src/csv";
import { SchemaError } from "../src/errors";

const FIXTURES = fileURLToPath(new URL("./fixtures", import.meta.url));

function tmpCsv(text: string): string {
  const dir = mkdtempSync(join(tmpdir(), "plots-csv-"));
  const path = join(dir, "table.csv");
  writeFileSync(path, text, "utf8");
  return path;
}

describe("readNumericCsv", () => {
  it("reads a drift series produced by the simulation CLI", () => {
    const table = readNumericCsv(join(FIXTURES, "gauss2_drift_energy.csv"), ["t", "value"]);
    expect(table.rowCount).toBe(11);
    const t = column(table, "t");
    const value = column(table, "value");
    expect(t[0]).toBe(0);
    expect(value[0]).toBe(0);
    expect(t[10]).toBeCloseTo(0.5, 12);
    expect(value.every((v) => Number.isFinite(v))).toBe(true);
  });

  it("maps the producer's 'nan' cells to NaN", () => {
    const table = readNumericCsv(
      join(FIXTURES, "order_gauss1.csv"), ["h", "error", "local_slope"]);
    const slopes = column(table, "local_slope");
    expect(Number.isNaN(slopes[0])).toBe(true);
    expect(slopes.slice(1).every((v) => Number.isFinite(v))).toBe(true);
  });

  it("understands signed infinities", () => {
    const table = readNumericCsv(tmpCsv("a,b,c\ninf,-inf,+inf\n"), ["a", "b", "c"]);
    expect(column(table, "a")[0]).toBe(Infinity);
    expect(column(table, "b")[0]).toBe(-Infinity);
    expect(column(table, "c")[0]).toBe(Infinity);
  });

  it("keeps columns beyond the required ones", () => {
    const table = readNumericCsv(join(FIXTURES, "gauss2_drift_energy.csv"), ["t"]);
    expect(column(table, "value").length).toBe(11);
  });

  it("rejects a missing file with the path in the message", () => {
    expect(() => readNumericCsv("/nonexistent/table.csv", ["t"]))
      .toThrow(SchemaError);
    expect(() => readNumericCsv("/nonexistent/table.csv", ["t"]))
      .toThrow(/\/nonexistent\/table\.csv: cannot read file/);
  });

  it("rejects a missing required column and names the header it saw", () => {
    const path = join(FIXTURES, "order_gauss1_components.csv");
    expect(() => readNumericCsv(path, ["h", "error"]))
      .toThrow(/missing required column 'error' \(header: h, err_x, err_y, err_z\)/);
  });

  it("rejects ragged rows", () => {
    expect(() => readNumericCsv(tmpCsv("a,b\n1,2,3\n"), ["a"]))
      .toThrow(/ragged row 1/);
    expect(() => readNumericCsv(tmpCsv("a,b\n1,2\n3\n"), ["a"]))
      .toThrow(/ragged row 2/);
  });

  it("rejects non-numeric cells, naming column and row", () => {
    expect(() => readNumericCsv(tmpCsv("a,b\n1,fast\n"), ["a", "b"]))
      .toThrow(/non-numeric cell 'fast' in column 'b' \(data row 1\)/);
  });

  it("rejects empty cells", () => {
    expect(() => readNumericCsv(tmpCsv("a,b\n1,\n"), ["a", "b"]))
      .toThrow(/empty cell in column 'b'/);
  });

  it("rejects a header-only file", () => {
    expect(() => readNumericCsv(tmpCsv("a,b\n"), ["a"])).toThrow(/no data rows/);
  });
});

describe("column", () => {
  it("turns an absent column into a SchemaError naming the file", () => {
    const table = readNumericCsv(tmpCsv("a\n1\n"), ["a"]);
    expect(() => column(table, "z")).toThrow(SchemaError);
    expect(() => column(table, "z")).toThrow(/missing required column 'z'/);
  });
});
