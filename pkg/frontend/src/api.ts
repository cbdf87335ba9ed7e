// Thin wrappers over the analytics service endpoints.

import type { FilmDocument } from './model.js';

export interface FilmSummary {
  film_id: string;
  n_faces: number;
}

export interface FilmListing {
  films: FilmSummary[];
  invalid: { file: string; error: string }[];
}

export async function fetchFilms(): Promise<FilmListing> {
  const resp = await fetch('/api/films');
  if (!resp.ok) throw new Error(`GET /api/films failed: ${resp.status}`);
  return (await resp.json()) as FilmListing;
}

export async function fetchFilm(filmId: string): Promise<FilmDocument> {
  const resp = await fetch(`/api/films/${encodeURIComponent(filmId)}`);
  if (!resp.ok) throw new Error(`GET /api/films/${filmId} failed: ${resp.status}`);
  return (await resp.json()) as FilmDocument;
}

export interface Explanations {
  confidence: string;
  bias: string;
}

export async function fetchExplanations(): Promise<Explanations> {
  // shipped as an editable content file next to the bundle
  const resp = await fetch('/content/explanations.json');
  if (!resp.ok) {
    return {
      confidence: 'How sure the AI was, on average, about its winning prediction.',
      bias: 'How the AI-predicted share compares to the actual share on a labeled validation set.',
    };
  }
  return (await resp.json()) as Explanations;
}
