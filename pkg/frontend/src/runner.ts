/**
 * CLI invocation. The command comes from NETREDUCE_CLI (may contain
 * arguments, e.g. "python3 -m netreduce.cli") and defaults to the
 * installed "netreduce" entry point.
 */

import { spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { CoreError, errorFromStderr } from "./errors.js";

export function cliCommand(): string[] {
  const raw = process.env.NETREDUCE_CLI ?? "netreduce";
  return raw.split(" ").filter((part) => part.length > 0);
}

export function runCli(args: string[], cwd: string): string {
  const [command, ...prefix] = cliCommand();
  const proc = spawnSync(command, [...prefix, ...args], {
    cwd,
    encoding: "utf-8",
    maxBuffer: 64 * 1024 * 1024,
  });
  if (proc.error) {
    throw new CoreError("CliUnavailable", `cannot launch '${command}': ${proc.error.message}`);
  }
  if (proc.status !== 0) {
    throw errorFromStderr(proc.stderr ?? "", proc.status ?? -1);
  }
  return proc.stdout ?? "";
}

export function withWorkdir<T>(fn: (dir: string) => T): T {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "netreduce-"));
  try {
    return fn(dir);
  } finally {
    fs.rmSync(dir, { recursive: true, force: true });
  }
}
