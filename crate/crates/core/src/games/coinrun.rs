//! CoinRun: run right past saws, pacing enemies and chasms to the coin.

use serde::{Deserialize, Serialize};

use super::platformer::{tile_box, Pacer, PlatformerState};
use super::{level_stream, move_action, GameId, GameLogic, Intent, Tick, NOOP};
use crate::entity::EntityKind;
use crate::error::Result;
use crate::levelgen::solve::{PlatformerProblem, RawBox};
use crate::levelgen::{platform_sequence, PlatformGame, PlatformLevel, PlatformRecipe, Verdict};
use crate::physics::Body;
use crate::render::Scene;
use crate::rng::labels;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoinRunParams {
    pub recipe: PlatformRecipe,
    pub memory_sections: (u32, u32),
    /// Enemies step one tile every this many ticks.
    pub enemy_period: u32,
    pub camera_tiles: i32,
    pub search_budget: usize,
    pub theme_pool: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoinRunLevel {
    pub level: PlatformLevel,
}

impl CoinRunLevel {
    pub fn generate(seed: u32, p: &CoinRunParams, memory: bool) -> Result<CoinRunLevel> {
        let mut rng = level_stream(GameId::CoinRun, seed, labels::LAYOUT);
        let mut recipe = p.recipe.clone();
        if memory {
            recipe.sections = p.memory_sections;
        }
        Ok(CoinRunLevel { level: platform_sequence(&mut rng, &recipe, PlatformGame::CoinRun) })
    }

    pub fn start(&self, p: &CoinRunParams) -> CoinRunState {
        let mut s = PlatformerState::new(&self.level, p.recipe.body, p.camera_tiles);
        s.pacers =
            self.level.placements.iter().filter(|q| q.kind == EntityKind::Enemy).map(Pacer::from_placement).collect();
        s.pacer_period = p.enemy_period;
        CoinRunState(s)
    }

    /// Physics search that treats every enemy's whole patrol span as lethal.
    pub fn solve(&self, p: &CoinRunParams) -> Verdict {
        let mut hazards: Vec<RawBox> =
            self.level.layout.positions(crate::grid::Tile::Hazard).into_iter().map(tile_box).collect();
        for q in self.level.placements.iter().filter(|q| q.kind == EntityKind::Enemy) {
            let (a, b) = (tile_box((q.span.0, q.tile.1)), tile_box((q.span.1, q.tile.1)));
            hazards.push((a.0, a.1, b.2, b.3));
        }
        let goal = self.level.placements.iter().find(|q| q.kind == EntityKind::Goal).expect("goal");
        let body = p.recipe.body;
        let problem = PlatformerProblem {
            layout: &self.level.layout,
            body,
            start: Body::standing_at(self.level.spawn.0, self.level.spawn.1, &body),
            hazards,
            goal: tile_box(goal.tile),
            actions: vec![
                (move_action(1, 0), 1, 0),
                (move_action(1, 1), 1, 1),
                (move_action(0, 1), 0, 1),
                (NOOP, 0, 0),
                (move_action(-1, 0), -1, 0),
                (move_action(-1, 1), -1, 1),
            ],
            max_ticks: 1000,
        };
        problem.solve(p.search_budget)
    }
}

#[derive(Clone, Debug)]
pub struct CoinRunState(pub PlatformerState);

impl GameLogic for CoinRunState {
    fn tick(&mut self, intent: Intent) -> Tick {
        self.0.tick(Intent { special: None, ..intent })
    }

    fn scene(&self) -> Scene<'_> {
        self.0.scene()
    }

    fn agent_tile(&self) -> (i32, i32) {
        self.0.agent_tile()
    }

    fn boxed_clone(&self) -> Box<dyn GameLogic> {
        Box::new(self.clone())
    }
}
