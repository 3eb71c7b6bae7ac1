import { basename, dirname, resolve } from "path";
import { SchemaError } from "./errors";

export type FigureKind = "drift" | "order";

export interface SeriesInput {
  /** Resolved path of the CSV (relative entries resolve against the spec file). */
  readonly path: string;
  /** Legend label; defaults to the input's basename without extension. */
  readonly label: string;
}

export interface FigureSpec {
  readonly kind: FigureKind;
  /** Resolved output path of the SVG. */
  readonly output: string;
  readonly inputs: readonly SeriesInput[];
  /** Dashed guide-line slopes for order figures; always empty for drift. */
  readonly referenceSlopes: readonly number[];
}

/** Flat key=value syntax shared with the simulation configs: '#' comments,
 *  cosmetic [section] headers, globally-unique lower-cased keys. */
function parseFlat(text: string, specPath: string): Map<string, string> {
  const raw = new Map<string, string>();
  text.split(/\r?\n/).forEach((line, index) => {
    const lineno = index + 1;
    const stripped = line.split("#", 1)[0].trim();
    if (stripped === "") {
      return;
    }
    if (stripped.startsWith("[")) {
      if (!stripped.endsWith("]") || stripped.length < 3) {
        throw new SchemaError(
          `${specPath}: line ${lineno}: malformed section header '${line.trim()}'`);
      }
      return;
    }
    const eq = stripped.indexOf("=");
    if (eq < 0) {
      throw new SchemaError(
        `${specPath}: line ${lineno}: expected key = value, got '${line.trim()}'`);
    }
    const key = stripped.slice(0, eq).trim().toLowerCase();
    const value = stripped.slice(eq + 1).trim();
    if (raw.has(key)) {
      throw new SchemaError(`${specPath}: line ${lineno}: duplicate key '${key}'`);
    }
    raw.set(key, value);
  });
  return raw;
}

const INPUT_KEY = /^input([1-9][0-9]*)$/;
const LABEL_KEY = /^label([1-9][0-9]*)$/;

export function parseFigureSpec(text: string, specPath: string): FigureSpec {
  const raw = parseFlat(text, specPath);
  const base = dirname(resolve(specPath));

  const inputs = new Map<number, string>();
  const labels = new Map<number, string>();
  for (const [key, value] of raw) {
    const asInput = INPUT_KEY.exec(key);
    const asLabel = LABEL_KEY.exec(key);
    if (asInput) {
      inputs.set(Number(asInput[1]), value);
    } else if (asLabel) {
      labels.set(Number(asLabel[1]), value);
    } else if (!["kind", "output", "reference_slopes"].includes(key)) {
      throw new SchemaError(`${specPath}: unknown key '${key}'`);
    }
  }

  const kind = raw.get("kind");
  if (kind === undefined) {
    throw new SchemaError(`${specPath}: missing required key 'kind'`);
  }
  if (kind !== "drift" && kind !== "order") {
    throw new SchemaError(
      `${specPath}: kind must be 'drift' or 'order', got '${kind}'`);
  }
  const output = raw.get("output");
  if (output === undefined || output === "") {
    throw new SchemaError(`${specPath}: missing required key 'output'`);
  }

  if (inputs.size === 0) {
    throw new SchemaError(`${specPath}: a figure needs at least one inputN key`);
  }
  const series: SeriesInput[] = [];
  for (let i = 1; i <= inputs.size; i += 1) {
    const path = inputs.get(i);
    if (path === undefined || path === "") {
      throw new SchemaError(
        `${specPath}: input keys must be dense (input${i} is missing)`);
    }
    const label = labels.get(i) ?? basename(path).replace(/\.[^.]*$/, "");
    labels.delete(i);
    series.push({ path: resolve(base, path), label });
  }
  if (labels.size > 0) {
    const orphan = Math.min(...labels.keys());
    throw new SchemaError(
      `${specPath}: label${orphan} has no matching input${orphan}`);
  }

  const slopesText = raw.get("reference_slopes");
  let referenceSlopes: number[] = [];
  if (slopesText !== undefined && slopesText !== "") {
    if (kind !== "order") {
      throw new SchemaError(
        `${specPath}: reference_slopes only applies to order figures`);
    }
    referenceSlopes = slopesText.split(",").map((part) => {
      const value = Number(part.trim());
      if (!Number.isFinite(value)) {
        throw new SchemaError(
          `${specPath}: reference_slopes entry '${part.trim()}' is not a number`);
      }
      return value;
    });
  }

  return { kind, output: resolve(base, output), inputs: series, referenceSlopes };
}
