// driver: node dist/plot.js <kind> <input> [-o output.svg]
import { runAndExit } from "./cli.js";

runAndExit(process.argv.slice(2));
