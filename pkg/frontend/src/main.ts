// Application wiring: one Store, an ApiClient, effect helpers that tag
// requests with generation counters, and a full re-render on every event.

import { ApiClient, ApiError } from "./api.js";
import { verbatim } from "./format.js";
import { renderCommonPanel } from "./render/common.js";
import { renderDrilldown } from "./render/drilldown.js";
import { renderMap } from "./render/map.js";
import { renderVarietyList } from "./render/varieties.js";
import type { Channel, Tab, ViewState } from "./state.js";
import { Store } from "./store.js";

export function setupApp(root: HTMLElement, api: ApiClient): Store {
  const store = new Store();

  root.innerHTML = `
    <div class="banner" id="error-banner" hidden></div>
    <div class="layout">
      <section class="map-pane">
        <div class="controls">
          <select id="attribute-menu"></select>
          <input id="year-timeline" type="range" step="1" />
          <span id="year-label"></span>
        </div>
        <div id="map"></div>
      </section>
      <section class="side-pane">
        <nav class="tabs">
          <button data-tab="varieties">Varieties</button>
          <button data-tab="common">Common Solution</button>
          <button data-tab="variability">Variability</button>
        </nav>
        <div id="panel-varieties" class="panel"></div>
        <div id="panel-common" class="panel" hidden></div>
        <div id="panel-variability" class="panel" hidden>
          <label>variability threshold
            <input id="tau-slider" type="range" min="0.1" max="1.0" step="0.1" />
            <span id="tau-label"></span>
          </label>
          <button id="tau-query">Query</button>
        </div>
        <div id="drilldown" class="panel"></div>
      </section>
    </div>
  `;

  const el = {
    banner: root.querySelector<HTMLElement>("#error-banner")!,
    attributeMenu: root.querySelector<HTMLSelectElement>("#attribute-menu")!,
    yearTimeline: root.querySelector<HTMLInputElement>("#year-timeline")!,
    yearLabel: root.querySelector<HTMLElement>("#year-label")!,
    map: root.querySelector<HTMLElement>("#map")!,
    tabs: Array.from(root.querySelectorAll<HTMLButtonElement>(".tabs button")),
    varieties: root.querySelector<HTMLElement>("#panel-varieties")!,
    common: root.querySelector<HTMLElement>("#panel-common")!,
    variability: root.querySelector<HTMLElement>("#panel-variability")!,
    tauSlider: root.querySelector<HTMLInputElement>("#tau-slider")!,
    tauLabel: root.querySelector<HTMLElement>("#tau-label")!,
    tauQuery: root.querySelector<HTMLButtonElement>("#tau-query")!,
    drilldown: root.querySelector<HTMLElement>("#drilldown")!,
  };

  function fail(err: unknown): void {
    const message =
      err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    store.dispatch({ type: "error-raised", message });
  }

  function begin(channel: Channel): number {
    return store.dispatch({ type: "fetch-started", channel }).generations[channel];
  }

  const effects = {
    loadAttribute(attribute: string, year: number): void {
      const generation = begin("attribute");
      api
        .attribute(attribute, year)
        .then((payload) =>
          store.dispatch({ type: "attribute-values", payload, generation }),
        )
        .catch(fail);
    },
    refreshHighlights(): void {
      const { selectedVarieties, brush } = store.state;
      const generation = begin("highlight");
      if (selectedVarieties.length === 0 && !brush) {
        store.dispatch({ type: "highlights-loaded", ids: [], generation });
        return;
      }
      const varieties = brush ? [brush.variety] : selectedVarieties;
      api
        .highlight(varieties, brush?.range)
        .then((res) =>
          store.dispatch({
            type: "highlights-loaded",
            ids: res.sub_region_ids,
            generation,
          }),
        )
        .catch(fail);
    },
    queryCommon(): void {
      const generation = begin("common");
      api
        .common(store.state.selectedVarieties)
        .then((payload) => store.dispatch({ type: "common-loaded", payload, generation }))
        .catch((err) => {
          if (err instanceof ApiError && err.status === 422) {
            store.dispatch({ type: "common-infeasible", generation });
          } else {
            fail(err);
          }
        });
    },
    loadDifferentiated(): void {
      const generation = begin("differentiated");
      api
        .differentiated(store.state.tau)
        .then((payload) =>
          store.dispatch({ type: "differentiated-loaded", payload, generation }),
        )
        .catch(fail);
    },
    inspect(id: string): void {
      store.dispatch({ type: "subregion-selected", id });
      const generation = begin("drilldown");
      api
        .topk(id)
        .then((payload) => store.dispatch({ type: "drilldown-loaded", payload, generation }))
        .catch(fail);
    },
  };

  // static control wiring
  el.attributeMenu.addEventListener("change", () => {
    store.dispatch({ type: "attribute-selected", attribute: el.attributeMenu.value });
    const { year } = store.state;
    if (year !== null) effects.loadAttribute(el.attributeMenu.value, year);
  });
  el.yearTimeline.addEventListener("change", () => {
    const year = Number(el.yearTimeline.value);
    store.dispatch({ type: "year-selected", year });
    const { attribute } = store.state;
    if (attribute) effects.loadAttribute(attribute, year);
  });
  for (const button of el.tabs) {
    button.addEventListener("click", () =>
      store.dispatch({ type: "tab-changed", tab: button.dataset.tab as Tab }),
    );
  }
  el.tauSlider.addEventListener("change", () => {
    store.dispatch({ type: "tau-changed", value: Number(el.tauSlider.value) });
  });
  el.tauQuery.addEventListener("click", () => effects.loadDifferentiated());

  function render(state: ViewState): void {
    el.banner.hidden = state.error === null;
    el.banner.textContent = state.error ?? "";

    if (state.meta) {
      const attrs = [...state.meta.weather_attributes, ...state.meta.soil_attributes];
      if (el.attributeMenu.options.length !== attrs.length) {
        el.attributeMenu.textContent = "";
        for (const name of attrs) {
          const option = document.createElement("option");
          option.value = name;
          option.textContent = name;
          el.attributeMenu.appendChild(option);
        }
      }
      el.yearTimeline.min = String(state.meta.years[0]);
      el.yearTimeline.max = String(state.meta.years[1]);
    }
    if (state.attribute) el.attributeMenu.value = state.attribute;
    if (state.year !== null) {
      el.yearTimeline.value = String(state.year);
      el.yearLabel.textContent = verbatim(state.year);
    }
    el.tauSlider.value = String(state.tau);
    el.tauLabel.textContent = verbatim(state.tau);

    for (const button of el.tabs) {
      button.classList.toggle("active", button.dataset.tab === state.tab);
    }
    el.varieties.hidden = state.tab !== "varieties";
    el.common.hidden = state.tab !== "common";
    el.variability.hidden = state.tab !== "variability";

    renderMap(el.map, {
      subregions: state.subregions,
      attributeValues: state.attributeValues,
      differentiated: state.tab === "variability" ? state.differentiated : null,
      highlighted: state.highlighted,
      selected: state.selectedSubregion,
      onSelect: (id) => effects.inspect(id),
    });
    renderVarietyList(el.varieties, {
      ranking: state.ranking,
      selected: state.selectedVarieties,
      brush: state.brush,
      onToggle: (variety) => {
        store.dispatch({ type: "variety-toggled", variety });
        effects.refreshHighlights();
      },
      onBrush: (variety, range) => {
        store.dispatch({ type: "brush-set", variety, range });
        effects.refreshHighlights();
      },
    });
    renderCommonPanel(el.common, {
      selected: state.selectedVarieties,
      result: state.commonResult,
      infeasible: state.commonInfeasible,
      onQuery: () => effects.queryCommon(),
    });
    renderDrilldown(el.drilldown, {
      drilldown: state.drilldown,
      onCountClick: (variety) => {
        const generation = begin("highlight");
        api
          .highlight([variety])
          .then((res) =>
            store.dispatch({
              type: "highlights-loaded",
              ids: res.sub_region_ids,
              generation,
            }),
          )
          .catch(fail);
      },
    });
  }

  store.subscribe(render);

  // initial loads: menus and panels are fed exclusively by the API
  api
    .meta()
    .then((meta) => {
      store.dispatch({ type: "meta-loaded", meta });
      store.dispatch({ type: "tau-changed", value: 1.0 });
      const firstAttr = meta.weather_attributes[0];
      const lastYear = meta.years[1];
      store.dispatch({ type: "attribute-selected", attribute: firstAttr });
      store.dispatch({ type: "year-selected", year: lastYear });
      effects.loadAttribute(firstAttr, lastYear);
    })
    .catch(fail);
  api
    .subregions()
    .then((subregions) => store.dispatch({ type: "subregions-loaded", subregions }))
    .catch(fail);
  api
    .varieties()
    .then((ranking) => store.dispatch({ type: "ranking-loaded", ranking }))
    .catch(fail);

  return store;
}

declare global {
  interface Window {
    seedmixStore?: Store;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  window.seedmixStore = setupApp(document.getElementById("app")!, new ApiClient(""));
}
