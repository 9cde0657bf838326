export const PORT = 8731;
export const BASE = `http://127.0.0.1:${PORT}`;
