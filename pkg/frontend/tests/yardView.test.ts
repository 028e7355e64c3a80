import { beforeEach, describe, expect, test } from "vitest";

import type { Occupant, YardSnapshot } from "../src/api.js";
import { renderDetail, renderYard } from "../src/yardView.js";

function occupant(overrides: Partial<Occupant>): Occupant {
  return {
    container_id: "C1",
    bay: 0,
    row: 0,
    tier: 0,
    segment: "S1",
    category: "cat1",
    stack_class: "C2",
    scores: [1.5, -2.25, -10.0],
    remaining_free_days: 3,
    appointment_block: 2,
    appointment_origin: "pre_existing",
    demurrage_rebooked: false,
    ...overrides,
  };
}

function snapshot(occupants: Occupant[]): YardSnapshot {
  return {
    version: 7,
    bays: 2,
    rows: 1,
    max_tier: 2,
    segments: [
      { id: "S1", bay_start: 0, bay_stop: 1, capacity: 2 },
      { id: "S3", bay_start: 1, bay_stop: 2, capacity: 2 },
    ],
    occupants,
  };
}

describe("renderYard", () => {
  let root: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = "<div id='root'></div>";
    root = document.getElementById("root")!;
  });

  test("shows the state version and one cell per bay/row", () => {
    renderYard(root, snapshot([occupant({})]));
    expect(root.dataset.version).toBe("7");
    expect(root.querySelectorAll(".yard-cell")).toHaveLength(2);
    expect(root.textContent).toContain("state version 7");
  });

  test("stacks render bottom-up with occupancy mirroring the payload", () => {
    const stacked = [
      occupant({ container_id: "LOW", tier: 0 }),
      occupant({ container_id: "HIGH", tier: 1 }),
    ];
    renderYard(root, snapshot(stacked));
    const glyphs = root.querySelectorAll(".tier.occupied");
    expect(glyphs).toHaveLength(2);
    const ids = [...glyphs].map((g) => (g as HTMLElement).dataset.containerId);
    expect(ids).toContain("LOW");
    expect(ids).toContain("HIGH");
  });

  test("segment hue classes follow the partition", () => {
    renderYard(root, snapshot([]));
    const cells = [...root.querySelectorAll(".yard-cell")] as HTMLElement[];
    expect(cells[0].className).toContain("seg-s1");
    expect(cells[1].className).toContain("seg-s3");
  });

  test("system-created demurrage appointments render pink", () => {
    const pink = occupant({
      container_id: "LATE",
      bay: 1,
      segment: "S3",
      category: "cat3",
      appointment_origin: "ips_created",
      demurrage_rebooked: true,
    });
    renderYard(root, snapshot([occupant({}), pink]));
    const glyph = root.querySelector("[data-container-id='LATE']")!;
    expect(glyph.classList.contains("pink")).toBe(true);
    const normal = root.querySelector("[data-container-id='C1']")!;
    expect(normal.classList.contains("pink")).toBe(false);
  });

  test("clicking a glyph surfaces the occupant", () => {
    let selected: Occupant | null = null;
    renderYard(root, snapshot([occupant({})]), { onSelect: (o) => (selected = o) });
    (root.querySelector(".tier.occupied") as HTMLElement).click();
    expect(selected).not.toBeNull();
    expect(selected!.container_id).toBe("C1");
  });
});

describe("renderDetail", () => {
  test("lists classification facts", () => {
    const panel = document.createElement("div");
    renderDetail(panel, occupant({ remaining_free_days: -4, category: "cat3" }));
    expect(panel.textContent).toContain("cat3");
    expect(panel.textContent).toContain("-4");
    expect(panel.textContent).toContain("block 2");
    expect(panel.textContent).toContain("1.500 / -2.250 / -10.000");
  });

  test("empty selection shows a hint", () => {
    const panel = document.createElement("div");
    renderDetail(panel, null);
    expect(panel.textContent).toContain("Select a container");
  });
});
