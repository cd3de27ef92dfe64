import { spawnSync } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

/** Non-zero exit from the core CLI, message taken from its stderr. */
export class CliError extends Error {
  constructor(message: string, readonly exitCode: number) {
    super(message);
    this.name = new.target.name;
  }
}

/** Exit code 2: malformed or inconsistent input. */
export class InputError extends CliError {}

/** Exit code 3: degenerate geometry / numerically unusable input. */
export class NumericalError extends CliError {}

/**
 * Command used to reach the core CLI. Override with MIMICKIT_CLI
 * (whitespace-split), e.g. "python3 -m mimickit.cli".
 */
export function cliCommand(): string[] {
  const raw = process.env.MIMICKIT_CLI ?? "mimickit";
  const parts = raw.split(/\s+/).filter(Boolean);
  if (parts.length === 0) throw new Error("MIMICKIT_CLI is empty");
  return parts;
}

export function runCli(args: string[]): string {
  const [cmd, ...prefix] = cliCommand();
  const res = spawnSync(cmd, [...prefix, ...args], {
    encoding: "utf8",
    maxBuffer: 64 * 1024 * 1024,
  });
  if (res.error) {
    throw new Error(`failed to launch core CLI '${cmd}': ${res.error.message}`);
  }
  if (res.status !== 0) {
    const message = (res.stderr ?? "").trim() || `core CLI exited with ${res.status}`;
    if (res.status === 2) throw new InputError(message, 2);
    if (res.status === 3) throw new NumericalError(message, 3);
    throw new CliError(message, res.status ?? -1);
  }
  return res.stdout ?? "";
}

export function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "mimickit-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}
