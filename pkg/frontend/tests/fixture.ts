// Typed access to fixtures/fk_cases.json. The JSON importer widens every
// array to number[], so the served tuples need one deliberate cast here
// instead of in every test.

import raw from '../fixtures/fk_cases.json';
import type { ArmConfig } from '../src/protocol.js';

export interface FkCase {
  q: number[];
  position: [number, number, number];
  orientation: [number, number, number, number];
}

export interface FixtureEntry {
  config: ArmConfig;
  cases: FkCase[];
}

export const fkFixture: { seed: number; cases_per_config: number; configs: FixtureEntry[] } =
  raw as unknown as { seed: number; cases_per_config: number; configs: FixtureEntry[] };
