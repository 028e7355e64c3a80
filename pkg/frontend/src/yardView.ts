// Top-down yard grid: one cell per (bay, row), stack glyphs drawn bottom-up.
// Segment hues come from the cell's segment id; containers whose demurrage
// appointment was created by the system render pink. Clicking a glyph fills
// the detail panel.

import type { Occupant, YardSnapshot } from "./api.js";

export interface YardViewHandlers {
  onSelect?: (occupant: Occupant) => void;
}

export function renderYard(
  root: HTMLElement,
  snapshot: YardSnapshot,
  handlers: YardViewHandlers = {},
): void {
  root.textContent = "";
  root.dataset.version = String(snapshot.version);

  const header = document.createElement("div");
  header.className = "yard-header";
  header.textContent = `Yard — state version ${snapshot.version}`;
  root.appendChild(header);

  const byCell = new Map<string, Occupant[]>();
  for (const occupant of snapshot.occupants) {
    const key = `${occupant.bay}:${occupant.row}`;
    const cell = byCell.get(key) ?? [];
    cell.push(occupant);
    byCell.set(key, cell);
  }
  for (const stack of byCell.values()) {
    stack.sort((a, b) => a.tier - b.tier);
  }

  const segmentOfBay = new Map<number, string>();
  for (const segment of snapshot.segments) {
    for (let bay = segment.bay_start; bay < segment.bay_stop; bay++) {
      segmentOfBay.set(bay, segment.id);
    }
  }

  const grid = document.createElement("div");
  grid.className = "yard-grid";
  grid.style.gridTemplateColumns = `repeat(${snapshot.bays}, 1fr)`;
  for (let row = snapshot.rows - 1; row >= 0; row--) {
    for (let bay = 0; bay < snapshot.bays; bay++) {
      const cell = document.createElement("div");
      const segment = segmentOfBay.get(bay) ?? "";
      cell.className = `yard-cell seg-${segment.toLowerCase() || "none"}`;
      cell.dataset.bay = String(bay);
      cell.dataset.row = String(row);
      const stack = byCell.get(`${bay}:${row}`) ?? [];
      for (const occupant of stack) {
        cell.appendChild(glyph(occupant, handlers));
      }
      for (let empty = stack.length; empty < snapshot.max_tier; empty++) {
        const slot = document.createElement("span");
        slot.className = "tier empty";
        cell.appendChild(slot);
      }
      grid.appendChild(cell);
    }
  }
  root.appendChild(grid);
}

function glyph(occupant: Occupant, handlers: YardViewHandlers): HTMLElement {
  const tier = document.createElement("span");
  tier.className = "tier occupied";
  if (occupant.demurrage_rebooked) {
    tier.classList.add("pink");
  }
  tier.dataset.containerId = occupant.container_id;
  tier.dataset.tier = String(occupant.tier);
  tier.title = occupant.container_id;
  tier.addEventListener("click", () => handlers.onSelect?.(occupant));
  return tier;
}

export function renderDetail(panel: HTMLElement, occupant: Occupant | null): void {
  panel.textContent = "";
  if (!occupant) {
    panel.textContent = "Select a container";
    return;
  }
  const rows: [string, string][] = [
    ["Container", occupant.container_id],
    ["Slot", `bay ${occupant.bay}, row ${occupant.row}, tier ${occupant.tier}`],
    ["Segment", occupant.segment || "—"],
    ["Category", occupant.category ?? "—"],
    ["Stack class", occupant.stack_class ?? "—"],
    [
      "Scores",
      occupant.scores ? occupant.scores.map((s) => s.toFixed(3)).join(" / ") : "—",
    ],
    [
      "Remaining free days",
      occupant.remaining_free_days === null ? "—" : String(occupant.remaining_free_days),
    ],
    [
      "Appointment",
      occupant.appointment_block === null
        ? "none"
        : `block ${occupant.appointment_block} (${occupant.appointment_origin ?? "unknown"})`,
    ],
  ];
  const list = document.createElement("dl");
  list.className = "detail";
  for (const [label, value] of rows) {
    const dt = document.createElement("dt");
    dt.textContent = label;
    const dd = document.createElement("dd");
    dd.textContent = value;
    list.append(dt, dd);
  }
  panel.appendChild(list);
}
