/**
 * Error surface mirroring the core: every failure carries the core error
 * code verbatim, whether raised locally at the boundary or parsed from the
 * CLI's machine-readable stderr line (`stage=... code=... msg=...`).
 */

export class CoreError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly stage: string | null = null,
    public readonly exitCode: number | null = null,
  ) {
    super(message);
    this.name = "CoreError";
  }
}

const DIAGNOSTIC = /^stage=(\S+) code=(\S+) msg=(.*)$/;

/** Parse the last diagnostic line of CLI stderr into a CoreError. */
export function errorFromStderr(stderr: string, exitCode: number): CoreError {
  const lines = stderr
    .split(/\r?\n/)
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
  for (let i = lines.length - 1; i >= 0; i--) {
    const match = DIAGNOSTIC.exec(lines[i]);
    if (match) {
      return new CoreError(match[2], match[3], match[1], exitCode);
    }
  }
  return new CoreError(
    "CliFailure",
    lines.length ? lines[lines.length - 1] : `CLI exited with code ${exitCode}`,
    null,
    exitCode,
  );
}
