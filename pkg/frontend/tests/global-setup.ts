// Spawns the Python editing service and generates .vocp fixtures once for
// the whole test run.

import { spawn, execFileSync, type ChildProcess } from 'node:child_process';
import path from 'node:path';
import { fileURLToPath } from 'node:url';

const here = path.dirname(fileURLToPath(import.meta.url));
const PORT = 8731;

let server: ChildProcess | undefined;

export async function setup(): Promise<void> {
  execFileSync('python3', [path.join(here, 'make_fixtures.py'), path.join(here, 'fixtures')]);
  server = spawn(
    'python3',
    ['-m', 'uvicorn', 'voicemorph.service:app', '--port', String(PORT), '--log-level', 'warning'],
    { stdio: 'ignore' },
  );
  const deadline = Date.now() + 60_000;
  for (;;) {
    try {
      const res = await fetch(`http://127.0.0.1:${PORT}/sessions`, { method: 'POST' });
      if (res.ok) return;
    } catch {
      /* not up yet */
    }
    if (Date.now() > deadline) throw new Error('editing service did not start');
    await new Promise((r) => setTimeout(r, 300));
  }
}

export async function teardown(): Promise<void> {
  server?.kill();
}
