// Builds the atlas fixtures once and serves them with the real seedmix
// service for the duration of the test run. Ports land in environment
// variables read by the tests.

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const frontendRoot = join(dirname(fileURLToPath(import.meta.url)), "..", "..");
const fixtures = join(frontendRoot, ".fixtures");

export const MAIN_PORT = 8871;
export const HIGHVAR_PORT = 8872;

const servers: ChildProcess[] = [];

async function waitReady(port: number): Promise<void> {
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`http://127.0.0.1:${port}/api/meta`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error(`service on port ${port} did not become ready`);
}

function serve(atlas: string, port: number): ChildProcess {
  const child = spawn(
    "seedmix",
    ["serve", "--atlas", join(fixtures, atlas), "--bind", `127.0.0.1:${port}`],
    { stdio: "ignore" },
  );
  servers.push(child);
  return child;
}

export default async function setup(): Promise<() => void> {
  execFileSync("python3", [join(frontendRoot, "scripts", "make_fixtures.py"),
    "--out", fixtures], { stdio: "inherit" });
  serve("atlas_main.json", MAIN_PORT);
  serve("atlas_highvar.json", HIGHVAR_PORT);
  await Promise.all([waitReady(MAIN_PORT), waitReady(HIGHVAR_PORT)]);
  process.env.SEEDMIX_MAIN_URL = `http://127.0.0.1:${MAIN_PORT}`;
  process.env.SEEDMIX_HIGHVAR_URL = `http://127.0.0.1:${HIGHVAR_PORT}`;
  return () => {
    for (const child of servers) child.kill("SIGTERM");
  };
}
