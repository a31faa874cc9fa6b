// field panel: node dist/bin/field.js <snapshot.bin> [-o output.svg]
import { runAndExit } from "../cli.js";

runAndExit(["field", ...process.argv.slice(2)]);
