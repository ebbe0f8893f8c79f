import type { MatrixResponse } from "./api.js";
import { statusColor, type Factor } from "./colors.js";

export interface MatrixCellView {
  pairId: string;
  row: number;
  col: number;
  value: number;
  status: string;
  statusColor: string;
}

export interface MatrixView {
  people: string[]; // manifest order, used for both axes
  factor: Factor;
  cells: MatrixCellView[];
}

/**
 * Co-occurrence matrix over people in manifest order on both axes; the cell
 * value is the selected factor, fetched as-is, with the review status as an
 * overlay color.
 */
export function buildMatrixView(
  matrix: MatrixResponse,
  factor: Factor,
  assignment?: string,
): MatrixView {
  const cells = matrix.cells
    .filter((c) => !assignment || c.assignment === assignment)
    .map((c) => ({
      pairId: c.pair_id,
      row: c.row,
      col: c.col,
      value: c[factor],
      status: c.status,
      statusColor: statusColor(c.status),
    }));
  return { people: matrix.people, factor, cells };
}

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

export function renderMatrixSvg(view: MatrixView, cellSize = 36): string {
  const n = view.people.length;
  const offset = 90;
  const size = offset + n * cellSize + 10;
  const labels = view.people
    .map((p, i) => {
      const mid = offset + i * cellSize + cellSize / 2;
      return (
        `<text x="${offset - 6}" y="${mid + 4}" text-anchor="end">${esc(p)}</text>` +
        `<text x="${mid}" y="${offset - 6}" text-anchor="start" transform="rotate(-60 ${mid} ${offset - 6})">${esc(p)}</text>`
      );
    })
    .join("");
  const cells = view.cells
    .map((c) => {
      const x = offset + c.col * cellSize;
      const y = offset + c.row * cellSize;
      const alpha = Math.max(0.06, Math.min(1, c.value));
      return (
        `<rect class="cell" data-pair-id="${esc(c.pairId)}" data-value="${c.value}"` +
        ` x="${x}" y="${y}" width="${cellSize - 2}" height="${cellSize - 2}"` +
        ` fill="rgba(40,80,160,${alpha.toFixed(3)})" stroke="${c.statusColor}" stroke-width="2">` +
        `<title>${esc(c.pairId)}: ${c.value.toFixed(3)} (${esc(c.status)})</title></rect>`
      );
    })
    .join("");
  return `<svg class="matrix" viewBox="0 0 ${size} ${size}" xmlns="http://www.w3.org/2000/svg">${labels}${cells}</svg>`;
}
