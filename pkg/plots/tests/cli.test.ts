import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { fileURLToPath } from "url";
import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { main } from "../src/cli";

const FIXTURES = fileURLToPath(new URL("./fixtures", import.meta.url));

let logSpy: ReturnType<typeof vi.spyOn>;
let errorSpy: ReturnType<typeof vi.spyOn>;

beforeEach(() => {
  logSpy = vi.spyOn(console, "log").mockImplementation(() => undefined);
  errorSpy = vi.spyOn(console, "error").mockImplementation(() => undefined);
});

afterEach(() => {
  vi.restoreAllMocks();
});

function writeSpec(lines: readonly string[]): string {
  const dir = mkdtempSync(join(tmpdir(), "plots-cli-"));
  const path = join(dir, "figure.spec");
  writeFileSync(path, lines.join("\n") + "\n", "utf8");
  return path;
}

describe("cli main", () => {
  it("renders a valid spec, prints the output path, and exits 0", () => {
    const spec = writeSpec([
      "kind = order",
      "output = order.svg",
      `input1 = ${join(FIXTURES, "order_gauss1.csv")}`,
      "reference_slopes = 2",
    ]);
    const code = main([spec]);
    expect(code).toBe(0);
    const written = join(spec, "..", "order.svg");
    expect(logSpy).toHaveBeenCalledTimes(1);
    expect(String(logSpy.mock.calls[0][0])).toContain("order.svg");
    expect(existsSync(written)).toBe(true);
    expect(errorSpy).not.toHaveBeenCalled();
  });

  it("is deterministic end to end: rerunning writes identical bytes", () => {
    const spec = writeSpec([
      "kind = drift",
      "output = drift.svg",
      `input1 = ${join(FIXTURES, "gauss2_drift_energy.csv")}`,
      `input2 = ${join(FIXTURES, "gauss2_drift_casimir.csv")}`,
    ]);
    expect(main([spec])).toBe(0);
    const out = join(spec, "..", "drift.svg");
    const bytes1 = readFileSync(out);
    expect(main([spec])).toBe(0);
    expect(readFileSync(out).equals(bytes1)).toBe(true);
  });

  it("reports a missing spec file as a schema error and exits 1", () => {
    const code = main(["/nonexistent/figure.spec"]);
    expect(code).toBe(1);
    expect(errorSpy).toHaveBeenCalledTimes(1);
    const message = String(errorSpy.mock.calls[0][0]);
    expect(message.startsWith("schema error:")).toBe(true);
    expect(message).toContain("cannot read spec file");
  });

  it("reports an invalid spec body as a schema error and exits 1", () => {
    const spec = writeSpec(["kind = pie", "output = o.svg", "input1 = a.csv"]);
    expect(main([spec])).toBe(1);
    expect(String(errorSpy.mock.calls[0][0]))
      .toContain("kind must be 'drift' or 'order'");
  });

  it("reports a spec whose data file is broken and exits 1", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-cli-bad-"));
    const csv = join(dir, "bad.csv");
    writeFileSync(csv, "h,error\n0.1,oops\n", "utf8");
    const spec = writeSpec(["kind = order", "output = o.svg", `input1 = ${csv}`]);
    expect(main([spec])).toBe(1);
    expect(String(errorSpy.mock.calls[0][0])).toContain("non-numeric cell 'oops'");
  });
});
