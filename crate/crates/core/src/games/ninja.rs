//! Ninja: charge jumps across narrow ledges to the mushroom, clearing bombs with throwing stars.

use serde::{Deserialize, Serialize};

use super::platformer::{tile_box, PlatformerState};
use super::{level_stream, move_action, GameId, GameLogic, Intent, Tick, NOOP};
use crate::entity::EntityKind;
use crate::error::Result;
use crate::levelgen::solve::PlatformerProblem;
use crate::levelgen::{platform_sequence, PlatformGame, PlatformLevel, PlatformRecipe, Verdict};
use crate::physics::Body;
use crate::render::Scene;
use crate::rng::labels;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NinjaParams {
    pub recipe: PlatformRecipe,
    pub star_speed: i32,
    pub star_ttl: i32,
    pub camera_tiles: i32,
    pub search_budget: usize,
    pub theme_pool: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NinjaLevel {
    pub level: PlatformLevel,
}

impl NinjaLevel {
    pub fn generate(seed: u32, p: &NinjaParams) -> Result<NinjaLevel> {
        let mut rng = level_stream(GameId::Ninja, seed, labels::LAYOUT);
        Ok(NinjaLevel { level: platform_sequence(&mut rng, &p.recipe, PlatformGame::Ninja) })
    }

    pub fn start(&self, p: &NinjaParams) -> NinjaState {
        let mut s = PlatformerState::new(&self.level, p.recipe.body, p.camera_tiles);
        s.bombs =
            self.level.placements.iter().filter(|q| q.kind == EntityKind::Bomb).map(|q| tile_box(q.tile)).collect();
        s.star_speed = p.star_speed;
        s.star_ttl = p.star_ttl;
        NinjaState(s)
    }

    /// Charged-jump physics search; bombs count as walls of death, so a
    /// level that needs a star to pass is reported unsolvable.
    pub fn solve(&self, p: &NinjaParams) -> Verdict {
        let goal = self.level.placements.iter().find(|q| q.kind == EntityKind::Goal).expect("goal");
        let body = p.recipe.body;
        let problem = PlatformerProblem {
            layout: &self.level.layout,
            body,
            start: Body::standing_at(self.level.spawn.0, self.level.spawn.1, &body),
            hazards: self
                .level
                .placements
                .iter()
                .filter(|q| q.kind == EntityKind::Bomb)
                .map(|q| tile_box(q.tile))
                .collect(),
            goal: tile_box(goal.tile),
            actions: vec![
                (move_action(1, 0), 1, 0),
                (move_action(0, 1), 0, 1),
                (NOOP, 0, 0),
                (move_action(-1, 0), -1, 0),
            ],
            max_ticks: 1000,
        };
        problem.solve(p.search_budget)
    }
}

#[derive(Clone, Debug)]
pub struct NinjaState(pub PlatformerState);

impl GameLogic for NinjaState {
    fn tick(&mut self, intent: Intent) -> Tick {
        self.0.tick(intent)
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
