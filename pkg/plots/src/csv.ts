import { readFileSync } from "fs";
import { parse } from "papaparse";
import { SchemaError } from "./errors";

/** A fully-validated numeric CSV: every required column present, every cell
 *  a finite number or an explicit "nan"/"inf" written by the producer. */
export interface NumericTable {
  readonly path: string;
  readonly columns: ReadonlyMap<string, readonly number[]>;
  readonly rowCount: number;
}

const SPECIAL: ReadonlyMap<string, number> = new Map([
  ["nan", Number.NaN],
  ["inf", Number.POSITIVE_INFINITY],
  ["+inf", Number.POSITIVE_INFINITY],
  ["-inf", Number.NEGATIVE_INFINITY],
]);

function parseCell(cell: string, path: string, column: string, row: number): number {
  const trimmed = cell.trim();
  const special = SPECIAL.get(trimmed.toLowerCase());
  if (special !== undefined) {
    return special;
  }
  if (trimmed === "") {
    throw new SchemaError(`${path}: empty cell in column '${column}' (data row ${row})`);
  }
  const value = Number(trimmed);
  if (Number.isNaN(value)) {
    throw new SchemaError(
      `${path}: non-numeric cell '${trimmed}' in column '${column}' (data row ${row})`);
  }
  return value;
}

/** Read a CSV and require the named columns; extra columns are kept. */
export function readNumericCsv(
  path: string,
  requiredColumns: readonly string[],
): NumericTable {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new SchemaError(`${path}: cannot read file (${(err as Error).message})`);
  }

  const parsed = parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: true,
  });
  for (const issue of parsed.errors) {
    if (issue.code === "TooFewFields" || issue.code === "TooManyFields") {
      throw new SchemaError(
        `${path}: ragged row ${issue.row === undefined ? "?" : issue.row + 1} (${issue.message})`);
    }
  }

  const header = parsed.meta.fields ?? [];
  for (const column of requiredColumns) {
    if (!header.includes(column)) {
      throw new SchemaError(
        `${path}: missing required column '${column}' (header: ${header.join(", ") || "none"})`);
    }
  }
  if (parsed.data.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }

  const columns = new Map<string, number[]>();
  for (const column of header) {
    columns.set(column, []);
  }
  parsed.data.forEach((record, row) => {
    for (const column of header) {
      const cell = record[column];
      if (cell === undefined) {
        throw new SchemaError(`${path}: ragged row ${row + 1} (missing '${column}')`);
      }
      (columns.get(column) as number[]).push(parseCell(cell, path, column, row + 1));
    }
  });
  return { path, columns, rowCount: parsed.data.length };
}

/** Column accessor that turns absence into a SchemaError naming the file. */
export function column(table: NumericTable, name: string): readonly number[] {
  const values = table.columns.get(name);
  if (values === undefined) {
    throw new SchemaError(`${table.path}: missing required column '${name}'`);
  }
  return values;
}
