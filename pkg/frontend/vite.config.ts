/// <reference types="vitest" />
import { defineConfig } from 'vite';

export default defineConfig({
  server: {
    // the editing service runs separately: `voicemorph serve --port 8765`
    proxy: {
      '/sessions': 'http://127.0.0.1:8765',
      '/morphobjects': 'http://127.0.0.1:8765',
      '/demo': 'http://127.0.0.1:8765',
    },
  },
  test: {
    environment: 'jsdom',
    globalSetup: './tests/global-setup.ts',
    testTimeout: 120000,
    hookTimeout: 120000,
  },
});
