#!/usr/bin/env node
/** CLI: plots <kind> <input.csv> -o <out.svg>
 *
 * Exit codes: 0 rendered, 1 schema mismatch or render failure, 2 usage. */

import { readFileSync, writeFileSync } from "node:fs";
import { parseCsv, SchemaError } from "./csv";
import { KINDS, Kind, render } from "./figures";

function usage(): void {
  process.stderr.write(`usage: plots <kind> <input.csv> -o <out.svg>\n` +
    `kinds: ${KINDS.join(" | ")}\n`);
}

export function main(argv: string[]): number {
  const args = [...argv];
  let out: string | null = null;
  const positional: string[] = [];
  while (args.length > 0) {
    const a = args.shift()!;
    if (a === "-o" || a === "--out") {
      out = args.shift() ?? null;
    } else if (a === "-h" || a === "--help") {
      usage();
      return 0;
    } else {
      positional.push(a);
    }
  }
  if (positional.length !== 2 || out === null) {
    usage();
    return 2;
  }
  const [kind, input] = positional;
  if (!(KINDS as readonly string[]).includes(kind)) {
    process.stderr.write(`unknown figure kind '${kind}'; kinds: ${KINDS.join(", ")}\n`);
    return 2;
  }
  let text: string;
  try {
    text = readFileSync(input, "utf8");
  } catch (err) {
    process.stderr.write(`cannot read ${input}: ${String(err)}\n`);
    return 2;
  }
  try {
    const result = render(kind as Kind, parseCsv(text));
    writeFileSync(out, result.svg, "utf8");
    for (const line of result.printed) {
      process.stdout.write(line + "\n");
    }
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(err.message + "\n");
      return 1;
    }
    process.stderr.write(`render failed: ${String(err)}\n`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
