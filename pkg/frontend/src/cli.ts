/** Figure CLI:
 *    render --spec fig.json           one FigureSpec, always re-renders
 *    make   --plan plan.json [--state state.json]   hash-keyed batch
 */

import { readFileSync } from "fs";
import { ArtifactError } from "./artifacts.js";
import { render } from "./figures.js";
import { loadPlan, makeFigures } from "./make.js";
import type { FigureSpec } from "./types.js";

function arg(flag: string): string | undefined {
  const i = process.argv.indexOf(flag);
  return i >= 0 ? process.argv[i + 1] : undefined;
}

function main(): number {
  const cmd = process.argv[2];
  try {
    if (cmd === "render") {
      const specPath = arg("--spec");
      if (!specPath) {
        console.error("render needs --spec FILE");
        return 1;
      }
      const spec = JSON.parse(readFileSync(specPath, "utf8")) as FigureSpec;
      const res = render(spec);
      console.log(`wrote ${res.out}`,
        Object.keys(res.facts).length ? JSON.stringify(res.facts) : "");
      return 0;
    }
    if (cmd === "make") {
      const planPath = arg("--plan");
      if (!planPath) {
        console.error("make needs --plan FILE");
        return 1;
      }
      const statePath = arg("--state") ?? planPath.replace(/\.json$/, "") + ".state.json";
      const { rendered, skipped } = makeFigures(loadPlan(planPath), statePath);
      console.log(`rendered ${rendered.length}, up-to-date ${skipped.length}`);
      return 0;
    }
    console.error("usage: cli.js render --spec FILE | make --plan FILE [--state FILE]");
    return 1;
  } catch (err) {
    if (err instanceof ArtifactError) {
      console.error(`artifact error: ${err.message}`);
      return 2;
    }
    console.error(String(err));
    return 2;
  }
}

process.exitCode = main();
