// two-run distance figure: node dist/bin/weakstrong.js <weakstrong.csv> [-o output.svg]
import { runAndExit } from "../cli.js";

runAndExit(["weakstrong", ...process.argv.slice(2)]);
