/** Write an SVG string to .svg or rasterize it to .png, by extension. */

import { writeFileSync } from "node:fs";
import { extname } from "node:path";

export async function writeImage(path: string, svg: string): Promise<void> {
  const ext = extname(path).toLowerCase();
  if (ext === ".svg") {
    writeFileSync(path, svg, "utf-8");
    return;
  }
  if (ext === ".png") {
    const { Resvg } = await import("@resvg/resvg-js");
    const png = new Resvg(svg, { background: "white" }).render().asPng();
    writeFileSync(path, png);
    return;
  }
  throw new Error(`unsupported output extension "${ext}" (use .svg or .png)`);
}
