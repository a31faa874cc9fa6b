// sharp-potential limit figure: node dist/bin/theta_limit.js <theta_limit.csv> [-o output.svg]
import { runAndExit } from "../cli.js";

runAndExit(["theta_limit", ...process.argv.slice(2)]);
