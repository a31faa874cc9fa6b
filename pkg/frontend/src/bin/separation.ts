// separation figure: node dist/bin/separation.js <diagnostics.csv> [-o output.svg]
import { runAndExit } from "../cli.js";

runAndExit(["separation", ...process.argv.slice(2)]);
