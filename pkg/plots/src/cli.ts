#!/usr/bin/env node
import { readFileSync } from "fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { SchemaError } from "./errors";
import { parseFigureSpec } from "./figspec";
import { renderToFile } from "./render";

export function main(argv: readonly string[]): number {
  const args = yargs(argv)
    .usage("$0 <spec>", "Render a figure spec (flat key=value file) to SVG",
      (cmd) => cmd.positional("spec", {
        describe: "path to the figure spec file",
        type: "string",
        demandOption: true,
      }))
    .strict()
    .help()
    .parseSync();

  const specPath = args.spec as string;
  try {
    let text: string;
    try {
      text = readFileSync(specPath, "utf8");
    } catch (err) {
      throw new SchemaError(
        `${specPath}: cannot read spec file (${(err as Error).message})`);
    }
    const spec = parseFigureSpec(text, specPath);
    const written = renderToFile(spec);
    console.log(written);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(main(hideBin(process.argv)));
}
