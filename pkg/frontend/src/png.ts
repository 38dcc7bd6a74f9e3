/** Minimal deterministic PNG writer (8-bit RGB, filter 0, fixed zlib level).
 *  Only node builtins, no metadata chunks, so bytes depend on pixels alone. */

import { deflateSync } from "zlib";

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(buf: Buffer): number {
  let c = 0xffffffff;
  for (let i = 0; i < buf.length; i++) c = CRC_TABLE[(c ^ buf[i]) & 0xff] ^ (c >>> 8);
  return (c ^ 0xffffffff) >>> 0;
}

function chunk(type: string, data: Buffer): Buffer {
  const len = Buffer.alloc(4);
  len.writeUInt32BE(data.length);
  const body = Buffer.concat([Buffer.from(type, "ascii"), data]);
  const crc = Buffer.alloc(4);
  crc.writeUInt32BE(crc32(body));
  return Buffer.concat([len, body, crc]);
}

/** rgb: width*height*3 bytes, row-major. */
export function encodePng(width: number, height: number, rgb: Uint8Array): Buffer {
  if (rgb.length !== width * height * 3) throw new Error("rgb buffer size mismatch");
  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(width, 0);
  ihdr.writeUInt32BE(height, 4);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 2; // truecolor
  const raw = Buffer.alloc(height * (1 + width * 3));
  for (let y = 0; y < height; y++) {
    raw[y * (1 + width * 3)] = 0; // filter: none
    rgb.subarray(y * width * 3, (y + 1) * width * 3)
      .forEach((v, i) => { raw[y * (1 + width * 3) + 1 + i] = v; });
  }
  const idat = deflateSync(raw, { level: 9 });
  return Buffer.concat([
    Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
    chunk("IHDR", ihdr),
    chunk("IDAT", idat),
    chunk("IEND", Buffer.alloc(0)),
  ]);
}

/** Perceptually-ordered small colormap (dark blue -> yellow). */
const STOPS: Array<[number, number, number]> = [
  [13, 8, 135], [84, 2, 163], [139, 10, 165], [185, 50, 137],
  [219, 92, 104], [244, 136, 73], [254, 188, 43], [240, 249, 33],
];

export function colormap(v: number): [number, number, number] {
  const x = Math.min(Math.max(v, 0), 1) * (STOPS.length - 1);
  const i = Math.min(Math.floor(x), STOPS.length - 2);
  const f = x - i;
  return [
    Math.round(STOPS[i][0] + f * (STOPS[i + 1][0] - STOPS[i][0])),
    Math.round(STOPS[i][1] + f * (STOPS[i + 1][1] - STOPS[i][1])),
    Math.round(STOPS[i][2] + f * (STOPS[i + 1][2] - STOPS[i][2])),
  ];
}

/** Render a 2D field (row-major n*n) to an upscaled heatmap PNG. */
export function heatmapPng(values: Float64Array, cells: number, scale = 4): Buffer {
  let vmax = 0;
  for (const v of values) if (v > vmax) vmax = v;
  const w = cells * scale;
  const rgb = new Uint8Array(w * w * 3);
  for (let py = 0; py < w; py++) {
    const i = Math.floor(py / scale);
    for (let px = 0; px < w; px++) {
      const j = Math.floor(px / scale);
      const v = vmax > 0 ? values[i * cells + j] / vmax : 0;
      const [r, g, b] = colormap(v);
      const o = (py * w + px) * 3;
      rgb[o] = r;
      rgb[o + 1] = g;
      rgb[o + 2] = b;
    }
  }
  return encodePng(w, w, rgb);
}
