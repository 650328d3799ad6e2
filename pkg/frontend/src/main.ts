#!/usr/bin/env node
// Bin entry; all logic lives in cli.ts so tests can import it side-effect free.
import { runCli } from "./cli.js";

process.exitCode = await runCli(process.argv.slice(2));
