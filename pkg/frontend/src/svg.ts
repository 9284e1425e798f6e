/** Minimal SVG string building; rendering stays deterministic and DOM-free. */

export type Attrs = Record<string, string | number>;

export function fmt(x: number): string {
  // fixed precision keeps output bytes stable across runs
  const s = x.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function attrText(attrs: Attrs): string {
  return Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${typeof v === "number" ? fmt(v) : esc(v)}"`)
    .join("");
}

export function el(name: string, attrs: Attrs, children: string[] = []): string {
  if (children.length === 0) {
    return `<${name}${attrText(attrs)}/>`;
  }
  return `<${name}${attrText(attrs)}>${children.join("")}</${name}>`;
}

export function text(content: string, attrs: Attrs): string {
  return `<text${attrText(attrs)}>${esc(content)}</text>`;
}

export function svgDocument(width: number, height: number, children: string[]): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">` +
    el("rect", { x: 0, y: 0, width, height, fill: "#ffffff" }) +
    children.join("") +
    `</svg>`
  );
}
