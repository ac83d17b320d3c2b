/** Small deterministic SVG assembly helpers shared by both figure kinds. */

export const ALGORITHM_COLORS: Record<string, string> = {
  ca: "#444444",
  sdpp: "#d62728",
  adpp: "#1f77b4",
  iadpp: "#2ca02c",
};

export const ACTIVITY_COLORS: Record<string, string> = {
  plan: "#1f77b4",
  "plan-cancelled": "#d62728",
  check: "#bbbbbb",
};

export function colorFor(name: string, palette: Record<string, string>): string {
  if (palette[name]) return palette[name];
  // stable fallback hue derived from the name
  let hash = 0;
  for (const ch of name) hash = (hash * 31 + ch.charCodeAt(0)) % 360;
  return `hsl(${hash}, 60%, 45%)`;
}

export function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function fmt(value: number): string {
  if (!Number.isFinite(value)) return "0";
  const rounded = Math.round(value * 1e6) / 1e6;
  return `${rounded}`;
}

export interface Scale {
  (value: number): number;
  ticks: number[];
}

/** Linear scale with round tick steps (1/2/5 ladder). */
export function linearScale(min: number, max: number, out0: number, out1: number): Scale {
  if (max <= min) max = min + 1;
  const span = max - min;
  const rawStep = span / 5;
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const step = [1, 2, 5, 10].map((m) => m * power).find((s) => s >= rawStep) ?? power * 10;
  const tick0 = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let t = tick0; t <= max + 1e-12; t += step) ticks.push(Math.round(t * 1e9) / 1e9);
  const scale = ((value: number) => out0 + ((value - min) / span) * (out1 - out0)) as Scale;
  scale.ticks = ticks;
  return scale;
}

export function svgDocument(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n` +
    body +
    `\n</svg>\n`
  );
}
