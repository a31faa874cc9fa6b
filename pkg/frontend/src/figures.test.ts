import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { renderFigure } from "./figures.js";
import { DIAGNOSTICS_HEADER } from "./formats.js";
import { divergingColor } from "./svg.js";

const dir = mkdtempSync(join(tmpdir(), "nsch-figs-"));

function writeTmp(name: string, data: string | Buffer): string {
  const p = join(dir, name);
  writeFileSync(p, data);
  return p;
}

function diagCsv(n: number): string {
  const lines = [DIAGNOSTICS_HEADER];
  for (let i = 0; i < n; i++) {
    const t = i * 0.1;
    lines.push(
      [t, 0, 2 - t * 0.1, 0.5 * Math.exp(-t), 1.5, 0.01, 0.02, Math.exp(-t), Math.exp(-2 * t), 1, -0.9, 0.9, 0.1 * (1 - Math.exp(-t)), Math.exp(-t), 1e-12].join(","),
    );
  }
  return lines.join("\n") + "\n";
}

describe("figure builders", () => {
  it("renders the three diagnostics figures from one CSV", () => {
    const p = writeTmp("d.csv", diagCsv(20));
    for (const kind of ["energy", "decay", "separation"] as const) {
      const svg = renderFigure({ kind, input: p, output: "x.svg" });
      expect(svg.startsWith("<svg")).toBe(true);
      expect(svg).toContain("polyline");
      expect(svg.length).toBeGreaterThan(500);
    }
  });

  it("renders empty axes from a header-only CSV", () => {
    const p = writeTmp("empty.csv", `${DIAGNOSTICS_HEADER}\n`);
    for (const kind of ["energy", "decay", "separation"] as const) {
      const svg = renderFigure({ kind, input: p, output: "x.svg" });
      expect(svg.startsWith("<svg")).toBe(true);
      expect(svg).not.toContain("polyline");
    }
  });

  it("keeps one marker per entry in the limit curve", () => {
    const rows = [4, 16, 64, 256].map((k) => `${k},${1 / k},${1 / k ** 2}`);
    const p = writeTmp("tl.csv", "k,theta,distance\n" + rows.join("\n") + "\n");
    const svg = renderFigure({ kind: "theta_limit", input: p, output: "x.svg" });
    expect((svg.match(/<circle/g) ?? []).length).toBe(4);
  });

  it("renders the weakstrong pair", () => {
    const rows = [0, 1, 2].map((t) => `${t},${1e-4 * Math.exp(t)},${2.5e-5 * Math.exp(t)}`);
    const p = writeTmp("ws.csv", "t,D_eps,D_half\n" + rows.join("\n") + "\n");
    const svg = renderFigure({ kind: "weakstrong", input: p, output: "x.svg" });
    expect(svg).toContain("D_eps");
  });

  it("renders a field panel with one cell per grid point", () => {
    const nx = 5;
    const ny = 3;
    const counts = [nx * ny, nx * ny, nx * ny, (nx + 1) * ny, nx * (ny + 1)];
    const buf = Buffer.alloc(24 + 8 * counts.reduce((a, b) => a + b, 0));
    buf.write("NSCH0001", 0, "latin1");
    buf.writeUInt32LE(nx, 8);
    buf.writeUInt32LE(ny, 12);
    buf.writeDoubleLE(1.5, 16);
    // phi outside [-1,1] on purpose: the colormap must clip
    buf.writeDoubleLE(3.0, 24);
    const p = writeTmp("f.bin", buf);
    const svg = renderFigure({ kind: "field", input: p, output: "x.svg" });
    // nx*ny field cells + 64 colorbar steps + 2 frames + background
    expect((svg.match(/<rect/g) ?? []).length).toBe(nx * ny + 64 + 3);
    expect(svg).toContain("t = 1.5");
  });
});

describe("diverging colormap", () => {
  it("hits the endpoints and clips", () => {
    expect(divergingColor(0)).toBe("rgb(255,255,255)");
    expect(divergingColor(1)).toBe("rgb(178,24,43)");
    expect(divergingColor(-1)).toBe("rgb(33,102,172)");
    expect(divergingColor(5)).toBe(divergingColor(1));
    expect(divergingColor(-5)).toBe(divergingColor(-1));
  });
});
