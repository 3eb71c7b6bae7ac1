import { sep } from "path";
import { describe, expect, it } from "vitest";
import { SchemaError } from "../src/errors";
import { parseFigureSpec } from "../src/figspec";

const SPEC_PATH = `${sep}specs${sep}fig.spec`;

function parse(text: string) {
  return parseFigureSpec(text, SPEC_PATH);
}

describe("parseFigureSpec", () => {
  it("parses a drift spec and resolves paths against the spec's directory", () => {
    const spec = parse([
      "kind = drift",
      "output = out/fig.svg",
      "input1 = csv/energy.csv",
      "input2 = csv/casimir.csv",
    ].join("\n"));
    expect(spec.kind).toBe("drift");
    expect(spec.output.split(sep)).toEqual(["", "specs", "out", "fig.svg"]);
    expect(spec.inputs.map((s) => s.path.split(sep).slice(-3))).toEqual([
      ["specs", "csv", "energy.csv"],
      ["specs", "csv", "casimir.csv"],
    ]);
    expect(spec.referenceSlopes).toEqual([]);
  });

  it("defaults labels to the input basename without extension", () => {
    const spec = parse("kind=drift\noutput=o.svg\ninput1=csv/gauss2_drift_energy.csv");
    expect(spec.inputs[0].label).toBe("gauss2_drift_energy");
  });

  it("honours explicit labels", () => {
    const spec = parse([
      "kind = drift",
      "output = o.svg",
      "input1 = a.csv",
      "label1 = 2-stage Gauss (order 4)",
    ].join("\n"));
    expect(spec.inputs[0].label).toBe("2-stage Gauss (order 4)");
  });

  it("treats sections and comments as cosmetic and keys as case-insensitive", () => {
    const spec = parse([
      "# a comment line",
      "[figure]",
      "KIND = order   # trailing comment",
      "Output = o.svg",
      "",
      "[series]",
      "INPUT1 = a.csv",
      "Reference_Slopes = 2, 4",
    ].join("\n"));
    expect(spec.kind).toBe("order");
    expect(spec.referenceSlopes).toEqual([2, 4]);
  });

  it("parses reference slopes as floats", () => {
    const spec = parse("kind=order\noutput=o.svg\ninput1=a.csv\nreference_slopes=1.5,6");
    expect(spec.referenceSlopes).toEqual([1.5, 6]);
  });

  const failures: ReadonlyArray<readonly [string, string, RegExp]> = [
    ["unknown key",
      "kind=drift\noutput=o.svg\ninput1=a.csv\nstile=3",
      /unknown key 'stile'/],
    ["input0 is not a valid series key",
      "kind=drift\noutput=o.svg\ninput0=a.csv",
      /unknown key 'input0'/],
    ["missing kind",
      "output=o.svg\ninput1=a.csv",
      /missing required key 'kind'/],
    ["bad kind",
      "kind=scatter\noutput=o.svg\ninput1=a.csv",
      /kind must be 'drift' or 'order', got 'scatter'/],
    ["missing output",
      "kind=drift\ninput1=a.csv",
      /missing required key 'output'/],
    ["no inputs",
      "kind=drift\noutput=o.svg",
      /at least one input/],
    ["non-dense inputs",
      "kind=drift\noutput=o.svg\ninput1=a.csv\ninput3=b.csv",
      /input keys must be dense \(input2 is missing\)/],
    ["orphan label",
      "kind=drift\noutput=o.svg\ninput1=a.csv\nlabel2=mystery",
      /label2 has no matching input2/],
    ["duplicate key",
      "kind=drift\nkind=order\noutput=o.svg\ninput1=a.csv",
      /line 2: duplicate key 'kind'/],
    ["duplicate key across sections",
      "[a]\nkind=drift\n[b]\nKIND=order\noutput=o.svg\ninput1=a.csv",
      /line 4: duplicate key 'kind'/],
    ["reference slopes on a drift figure",
      "kind=drift\noutput=o.svg\ninput1=a.csv\nreference_slopes=2",
      /reference_slopes only applies to order figures/],
    ["non-numeric slope",
      "kind=order\noutput=o.svg\ninput1=a.csv\nreference_slopes=2, fast",
      /reference_slopes entry 'fast' is not a number/],
    ["line without '='",
      "kind=drift\noutput o.svg\ninput1=a.csv",
      /line 2: expected key = value, got 'output o.svg'/],
    ["malformed section header",
      "[oops\nkind=drift\noutput=o.svg\ninput1=a.csv",
      /line 1: malformed section header '\[oops'/],
  ];

  it.each(failures)("rejects %s", (_name, text, message) => {
    expect(() => parse(text)).toThrow(SchemaError);
    expect(() => parse(text)).toThrow(message);
    expect(() => parse(text)).toThrow(/fig\.spec/);
  });
});
