import { spawnSync } from "node:child_process";

import { CliError } from "./errors.js";

/** Resolve the native CLI; override with DEGRAFORGE_BIN (may contain args). */
export function cliCommand(): string[] {
  const env = process.env.DEGRAFORGE_BIN;
  if (env && env.trim()) {
    return env.trim().split(/\s+/);
  }
  return ["degraforge"];
}

export interface CliResult {
  status: number;
  stdout: string;
  stderr: string;
}

export function runCli(args: string[], allowedStatus: number[] = [0]): CliResult {
  const [command, ...prefix] = cliCommand();
  const result = spawnSync(command, [...prefix, ...args], {
    encoding: "utf8",
    maxBuffer: 64 * 1024 * 1024,
  });
  if (result.error) {
    throw new CliError(`failed to launch ${command}: ${result.error.message}`, null, "");
  }
  const status = result.status ?? -1;
  if (!allowedStatus.includes(status)) {
    throw new CliError(
      `degraforge ${args[0]} exited with status ${status}: ${result.stderr.trim()}`,
      status,
      result.stderr,
    );
  }
  return { status, stdout: result.stdout, stderr: result.stderr };
}
