// Viewer entry point: load the film list, let the user pick up to four
// films, and render the comparison row.

import { fetchExplanations, fetchFilm, fetchFilms } from './api.js';
import {
  COMPARISON_LIMIT,
  FilmDocument,
  ViewerOptions,
  buildComparison,
  validateDocument,
} from './model.js';
import { renderComparison, renderErrorPanel } from './render.js';

const state: {
  available: string[];
  selected: string[];
  options: ViewerOptions;
} = { available: [], selected: [], options: {} };

async function redraw(): Promise<void> {
  const mount = document.getElementById('charts');
  if (!mount) return;
  mount.replaceChildren();
  const explanations = await fetchExplanations();

  const docs: FilmDocument[] = [];
  for (const filmId of state.selected) {
    const doc = await fetchFilm(filmId);
    const errors = validateDocument(doc);
    if (errors.length) {
      mount.appendChild(renderErrorPanel(filmId, errors));
    } else {
      docs.push(doc);
    }
  }
  mount.appendChild(renderComparison(buildComparison(docs, state.options), explanations));
}

function renderControls(): void {
  const controls = document.getElementById('controls');
  if (!controls) return;
  controls.replaceChildren();

  for (const filmId of state.available) {
    const label = document.createElement('label');
    label.className = 'film-toggle';
    const box = document.createElement('input');
    box.type = 'checkbox';
    box.checked = state.selected.includes(filmId);
    box.addEventListener('change', () => {
      if (box.checked) {
        if (state.selected.length >= COMPARISON_LIMIT) {
          box.checked = false;
          alert(`At most ${COMPARISON_LIMIT} films can be compared at once.`);
          return;
        }
        state.selected.push(filmId);
      } else {
        state.selected = state.selected.filter((id) => id !== filmId);
      }
      void redraw();
    });
    label.append(box, document.createTextNode(` ${filmId}`));
    controls.appendChild(label);
  }

  const optionDefs: [string, keyof ViewerOptions][] = [
    ['distinct colors per group', 'distinctIntersectionColors'],
    ['legend', 'showLegend'],
  ];
  for (const [text, key] of optionDefs) {
    const label = document.createElement('label');
    label.className = 'option-toggle';
    const box = document.createElement('input');
    box.type = 'checkbox';
    box.addEventListener('change', () => {
      state.options = { ...state.options, [key]: box.checked };
      void redraw();
    });
    label.append(box, document.createTextNode(` ${text}`));
    controls.appendChild(label);
  }
}

async function boot(): Promise<void> {
  const listing = await fetchFilms();
  state.available = listing.films.map((f) => f.film_id);
  state.selected = state.available.slice(0, COMPARISON_LIMIT);
  renderControls();
  const notices = document.getElementById('notices');
  if (notices && listing.invalid.length) {
    for (const entry of listing.invalid) {
      notices.appendChild(renderErrorPanel(entry.file, [entry.error]));
    }
  }
  await redraw();
}

void boot();
