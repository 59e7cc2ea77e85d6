//! Position-specific feature schemas.
//!
//! Each historical feature appears once per aggregation horizon (1, 3, 5,
//! 10, 38 most recent matches), laid out horizon-major: player block, then
//! team block, then opponent block, with the current match-status block at
//! the end.

use std::sync::OnceLock;

use crate::types::Position;
use crate::util::fnv1a64;

pub const HORIZONS: [usize; 5] = [1, 3, 5, 10, 38];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlayerFeat {
    FplPoints,
    RelevantFplPoints,
    Minutes,
    Influence,
    Creativity,
    Threat,
    GoalsScored,
    PenaltiesMissed,
    Assists,
    GoalsConceded,
    OwnGoals,
    Saves,
    PenaltiesSaved,
    YellowCards,
    RedCards,
    Bps,
    Bonus,
    Shots,
    Xg,
    XgChain,
    XgBuildup,
    KeyPasses,
    Xa,
}

impl PlayerFeat {
    pub fn key(&self) -> &'static str {
        match self {
            PlayerFeat::FplPoints => "fpl_points",
            PlayerFeat::RelevantFplPoints => "relevant_fpl_points",
            PlayerFeat::Minutes => "minutes",
            PlayerFeat::Influence => "influence",
            PlayerFeat::Creativity => "creativity",
            PlayerFeat::Threat => "threat",
            PlayerFeat::GoalsScored => "goals_scored",
            PlayerFeat::PenaltiesMissed => "penalties_missed",
            PlayerFeat::Assists => "assists",
            PlayerFeat::GoalsConceded => "goals_conceded",
            PlayerFeat::OwnGoals => "own_goals",
            PlayerFeat::Saves => "saves",
            PlayerFeat::PenaltiesSaved => "penalties_saved",
            PlayerFeat::YellowCards => "yellow_cards",
            PlayerFeat::RedCards => "red_cards",
            PlayerFeat::Bps => "bps",
            PlayerFeat::Bonus => "bonus",
            PlayerFeat::Shots => "shots",
            PlayerFeat::Xg => "xg",
            PlayerFeat::XgChain => "xg_chain",
            PlayerFeat::XgBuildup => "xg_buildup",
            PlayerFeat::KeyPasses => "key_passes",
            PlayerFeat::Xa => "xa",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TeamFeat {
    GoalsScored,
    GoalsConceded,
    LeagueRank,
    OpponentLeagueRank,
    Xg,
    DeepAllowed,
    PpdaAllowedAtt,
    PpdaAllowedDef,
    Xga,
    Deep,
    PpdaAtt,
    PpdaDef,
}

impl TeamFeat {
    pub fn key(&self) -> &'static str {
        match self {
            TeamFeat::GoalsScored => "goals_scored",
            TeamFeat::GoalsConceded => "goals_conceded",
            TeamFeat::LeagueRank => "league_rank",
            TeamFeat::OpponentLeagueRank => "opponent_league_rank",
            TeamFeat::Xg => "xg",
            TeamFeat::DeepAllowed => "deep_allowed",
            TeamFeat::PpdaAllowedAtt => "ppda_allowed_att",
            TeamFeat::PpdaAllowedDef => "ppda_allowed_def",
            TeamFeat::Xga => "xga",
            TeamFeat::Deep => "deep",
            TeamFeat::PpdaAtt => "ppda_att",
            TeamFeat::PpdaDef => "ppda_def",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatusFeat {
    Availability,
    TeamLeagueRank,
    OpponentLeagueRank,
}

impl StatusFeat {
    pub fn key(&self) -> &'static str {
        match self {
            StatusFeat::Availability => "availability",
            StatusFeat::TeamLeagueRank => "team_league_rank",
            StatusFeat::OpponentLeagueRank => "opponent_league_rank",
        }
    }
}

/// The ordered feature plan for one position.
#[derive(Debug, Clone)]
pub struct PositionSchema {
    pub position: Position,
    pub version: String,
    pub player_feats: Vec<PlayerFeat>,
    pub team_feats: Vec<TeamFeat>,
    pub opponent_feats: Vec<TeamFeat>,
    pub status_feats: Vec<StatusFeat>,
    pub feature_names: Vec<String>,
}

impl PositionSchema {
    pub fn expected_count(&self) -> usize {
        self.feature_names.len()
    }
}

fn player_feats_for(position: Position) -> Vec<PlayerFeat> {
    use PlayerFeat::*;
    let all = [
        FplPoints,
        RelevantFplPoints,
        Minutes,
        Influence,
        Creativity,
        Threat,
        GoalsScored,
        PenaltiesMissed,
        Assists,
        GoalsConceded,
        OwnGoals,
        Saves,
        PenaltiesSaved,
        YellowCards,
        RedCards,
        Bps,
        Bonus,
        Shots,
        Xg,
        XgChain,
        XgBuildup,
        KeyPasses,
        Xa,
    ];
    all.into_iter()
        .filter(|f| match position {
            Position::Gk => !matches!(f, GoalsScored | PenaltiesMissed | Shots | Xg),
            Position::Def | Position::Mid | Position::Fwd => {
                !matches!(f, Saves | PenaltiesSaved)
            }
            Position::Am => matches!(f, FplPoints | RelevantFplPoints),
        })
        .collect()
}

fn team_feats_for(position: Position) -> Vec<TeamFeat> {
    use TeamFeat::*;
    let all = [
        GoalsScored,
        GoalsConceded,
        LeagueRank,
        OpponentLeagueRank,
        Xg,
        DeepAllowed,
        PpdaAllowedAtt,
        PpdaAllowedDef,
        Xga,
        Deep,
        PpdaAtt,
        PpdaDef,
    ];
    all.into_iter()
        .filter(|f| {
            position == Position::Am || !matches!(f, LeagueRank | OpponentLeagueRank)
        })
        .collect()
}

fn opponent_feats_for(_position: Position) -> Vec<TeamFeat> {
    use TeamFeat::*;
    vec![
        GoalsScored,
        GoalsConceded,
        Xg,
        DeepAllowed,
        PpdaAllowedAtt,
        PpdaAllowedDef,
        Xga,
        Deep,
        PpdaAtt,
        PpdaDef,
    ]
}

fn status_feats_for(position: Position) -> Vec<StatusFeat> {
    match position {
        Position::Am => vec![StatusFeat::TeamLeagueRank, StatusFeat::OpponentLeagueRank],
        _ => vec![StatusFeat::Availability],
    }
}

fn build_schema(position: Position) -> PositionSchema {
    let player_feats = player_feats_for(position);
    let team_feats = team_feats_for(position);
    let opponent_feats = opponent_feats_for(position);
    let status_feats = status_feats_for(position);

    let mut names = Vec::new();
    for h in HORIZONS {
        for f in &player_feats {
            names.push(format!("p_{}_h{}", f.key(), h));
        }
        for f in &team_feats {
            names.push(format!("t_{}_h{}", f.key(), h));
        }
        for f in &opponent_feats {
            names.push(format!("o_{}_h{}", f.key(), h));
        }
    }
    for f in &status_feats {
        names.push(format!("s_{}", f.key()));
    }

    let digest = fnv1a64(names.join(",").as_bytes());
    let version = format!("{}-v1-{:08x}", position.code(), digest as u32);
    PositionSchema {
        position,
        version,
        player_feats,
        team_feats,
        opponent_feats,
        status_feats,
        feature_names: names,
    }
}

/// The schema for a position (built once, cached for the process lifetime).
pub fn schema_for(position: Position) -> &'static PositionSchema {
    static SCHEMAS: OnceLock<Vec<PositionSchema>> = OnceLock::new();
    let schemas = SCHEMAS.get_or_init(|| Position::ALL.iter().map(|&p| build_schema(p)).collect());
    schemas
        .iter()
        .find(|s| s.position == position)
        .expect("schema for every position")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feature_counts_match_published_sets() {
        assert_eq!(schema_for(Position::Gk).expected_count(), 196);
        assert_eq!(schema_for(Position::Def).expected_count(), 206);
        assert_eq!(schema_for(Position::Mid).expected_count(), 206);
        assert_eq!(schema_for(Position::Fwd).expected_count(), 206);
        assert_eq!(schema_for(Position::Am).expected_count(), 122);
    }

    #[test]
    fn counts_decompose_into_blocks() {
        // per-horizon block sizes times five horizons plus status size
        for (pos, p, t, o, s) in [
            (Position::Gk, 19, 10, 10, 1),
            (Position::Def, 21, 10, 10, 1),
            (Position::Am, 2, 12, 10, 2),
        ] {
            let schema = schema_for(pos);
            assert_eq!(schema.player_feats.len(), p);
            assert_eq!(schema.team_feats.len(), t);
            assert_eq!(schema.opponent_feats.len(), o);
            assert_eq!(schema.status_feats.len(), s);
            assert_eq!(schema.expected_count(), (p + t + o) * 5 + s);
        }
    }

    #[test]
    fn am_status_block_is_current_ranks() {
        let schema = schema_for(Position::Am);
        let names = &schema.feature_names;
        assert_eq!(names[names.len() - 2], "s_team_league_rank");
        assert_eq!(names[names.len() - 1], "s_opponent_league_rank");
    }

    #[test]
    fn versions_are_distinct_per_position() {
        let mut versions: Vec<&str> = Position::ALL
            .iter()
            .map(|&p| schema_for(p).version.as_str())
            .collect();
        versions.dedup();
        assert_eq!(versions.len(), 5);
    }
}
