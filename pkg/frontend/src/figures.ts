/**
 * The six figure kinds. Each builder reads its inputs, applies the fixed
 * axes policy (log scale for energies and decay curves, linear for fields
 * and separation), and returns an SVG string.
 */

import { column, readCsv, readDiagnostics, readSnapshot } from "./formats.js";
import { fieldPanel, lineChart, Series } from "./svg.js";

export const FIGURE_KINDS = [
  "energy",
  "decay",
  "separation",
  "field",
  "theta_limit",
  "weakstrong",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureSpec {
  kind: FigureKind;
  input: string;
  output: string;
}

function positive(values: number[]): boolean {
  return values.every((v) => v > 0);
}

export function energyFigure(input: string): string {
  const table = readDiagnostics(input);
  const t = column(table, "t", input);
  const series: Series[] = [
    { label: "E_total", x: t, y: column(table, "E_total", input) },
    { label: "E_kin", x: t, y: column(table, "E_kin", input) },
    { label: "E_free", x: t, y: column(table, "E_free", input) },
    { label: "D_visc", x: t, y: column(table, "D_visc", input) },
    { label: "D_chem", x: t, y: column(table, "D_chem", input) },
  ];
  // energies can cross zero once the mixture separates; fall back to a
  // linear axis then so nothing silently disappears
  const log = series.every((s) => positive(s.y)) && table.rows > 0;
  return lineChart(series, {
    title: "Energy and dissipation",
    xLabel: "t",
    yLabel: "energy / dissipation rate",
    yScale: log ? "log" : "linear",
  });
}

export function decayFigure(input: string): string {
  const table = readDiagnostics(input);
  const t = column(table, "t", input);
  return lineChart(
    [
      { label: "u_L2", x: t, y: column(table, "u_L2", input) },
      { label: "grad_mu_L2", x: t, y: column(table, "grad_mu_L2", input) },
      { label: "stat_mu_res", x: t, y: column(table, "stat_mu_residual", input) },
    ],
    { title: "Decay of velocity and chemical-potential gradients", xLabel: "t", yLabel: "L2 norm", yScale: "log" },
  );
}

export function separationFigure(input: string): string {
  const table = readDiagnostics(input);
  const t = column(table, "t", input);
  return lineChart(
    [
      { label: "sep_delta", x: t, y: column(table, "sep_delta", input) },
      { label: "phi_max", x: t, y: column(table, "phi_max", input) },
      { label: "phi_min", x: t, y: column(table, "phi_min", input) },
    ],
    { title: "Separation from the pure phases", xLabel: "t", yLabel: "value" },
  );
}

export function fieldFigure(input: string): string {
  const snap = readSnapshot(input);
  return fieldPanel(snap.phi, snap.nx, snap.ny, `phi at t = ${snap.t}`);
}

export function thetaLimitFigure(input: string): string {
  const table = readCsv(input, "k,theta,distance");
  return lineChart(
    [{ label: "||phi_k - phi_obstacle||", x: column(table, "theta", input), y: column(table, "distance", input) }],
    {
      title: "Sharp-potential limit",
      xLabel: "theta",
      yLabel: "distance at horizon",
      xScale: "log",
      yScale: "log",
    },
  );
}

export function weakstrongFigure(input: string): string {
  const table = readCsv(input, "t,D_eps,D_half");
  const t = column(table, "t", input);
  return lineChart(
    [
      { label: "D_eps", x: t, y: column(table, "D_eps", input) },
      { label: "D_eps/2", x: t, y: column(table, "D_half", input) },
    ],
    { title: "Two-run distance growth", xLabel: "t", yLabel: "D(t)", yScale: "log" },
  );
}

export function renderFigure(spec: FigureSpec): string {
  switch (spec.kind) {
    case "energy":
      return energyFigure(spec.input);
    case "decay":
      return decayFigure(spec.input);
    case "separation":
      return separationFigure(spec.input);
    case "field":
      return fieldFigure(spec.input);
    case "theta_limit":
      return thetaLimitFigure(spec.input);
    case "weakstrong":
      return weakstrongFigure(spec.input);
  }
}
