// energy figure: node dist/bin/energy.js <diagnostics.csv> [-o output.svg]
import { runAndExit } from "../cli.js";

runAndExit(["energy", ...process.argv.slice(2)]);
