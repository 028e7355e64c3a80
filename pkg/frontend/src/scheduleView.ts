// Per-block truck-count bars against the capacity threshold line, with a
// before/after overlay once a rebalance has run. Bar heights carry the exact
// payload value in data-value so what the planner sees is what the service
// reported.

import type { HistogramSnapshot, ScheduleSnapshot } from "./api.js";

const PIXELS_PER_TRUCK = 3;

export function renderSchedule(root: HTMLElement, snapshot: ScheduleSnapshot): void {
  root.textContent = "";
  root.dataset.version = String(snapshot.version);
  const title = document.createElement("div");
  title.className = "schedule-header";
  title.textContent = `Schedule for ${snapshot.day} — capacity ${snapshot.block_capacity}/block`;
  root.appendChild(title);

  const lane = document.createElement("div");
  lane.className = "bars";
  for (const block of snapshot.blocks) {
    const group = document.createElement("div");
    group.className = "bar-group";
    const bar = document.createElement("div");
    bar.className = "bar now" + (block.congested ? " congested" : "");
    bar.dataset.value = String(block.truck_count);
    bar.style.height = `${block.truck_count * PIXELS_PER_TRUCK}px`;
    bar.title = `block ${block.index}: ${block.truck_count} trucks`;
    const label = document.createElement("span");
    label.className = "bar-label";
    label.textContent = String(block.index);
    group.append(bar, label);
    lane.appendChild(group);
  }
  root.appendChild(lane);
  root.appendChild(thresholdLine(snapshot.block_capacity));
}

export function renderHistogram(root: HTMLElement, snapshot: HistogramSnapshot): void {
  root.textContent = "";
  root.dataset.version = String(snapshot.version);
  const lane = document.createElement("div");
  lane.className = "bars";
  for (const block of snapshot.blocks) {
    const group = document.createElement("div");
    group.className = "bar-group";
    group.dataset.index = String(block.index);
    const before = document.createElement("div");
    before.className = "bar before";
    before.dataset.value = String(block.before);
    before.style.height = `${block.before * PIXELS_PER_TRUCK}px`;
    const after = document.createElement("div");
    after.className = "bar after";
    after.dataset.value = String(block.after);
    after.style.height = `${block.after * PIXELS_PER_TRUCK}px`;
    const label = document.createElement("span");
    label.className = "bar-label";
    label.textContent = String(block.index);
    group.append(before, after, label);
    lane.appendChild(group);
  }
  root.appendChild(lane);
  const capacity = snapshot.blocks[0]?.capacity ?? 0;
  root.appendChild(thresholdLine(capacity));
}

function thresholdLine(capacity: number): HTMLElement {
  const line = document.createElement("div");
  line.className = "threshold";
  line.dataset.capacity = String(capacity);
  line.style.bottom = `${capacity * PIXELS_PER_TRUCK}px`;
  line.title = `stopping threshold: ${capacity}`;
  return line;
}
