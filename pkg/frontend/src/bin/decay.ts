// decay figure: node dist/bin/decay.js <diagnostics.csv> [-o output.svg]
import { runAndExit } from "../cli.js";

runAndExit(["decay", ...process.argv.slice(2)]);
