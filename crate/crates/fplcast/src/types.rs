//! Shared domain types: positions, record shapes, fixtures, and ids.

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// FPL element position. `Am` is the assistant-manager element type scored
/// on team results rather than individual match actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Position {
    #[serde(rename = "GK")]
    Gk,
    #[serde(rename = "DEF")]
    Def,
    #[serde(rename = "MID")]
    Mid,
    #[serde(rename = "FWD")]
    Fwd,
    #[serde(rename = "AM")]
    Am,
}

impl Position {
    pub const ALL: [Position; 5] = [
        Position::Gk,
        Position::Def,
        Position::Mid,
        Position::Fwd,
        Position::Am,
    ];

    pub fn code(&self) -> &'static str {
        match self {
            Position::Gk => "GK",
            Position::Def => "DEF",
            Position::Mid => "MID",
            Position::Fwd => "FWD",
            Position::Am => "AM",
        }
    }

    pub fn parse(code: &str) -> Result<Position> {
        match code.trim() {
            "GK" | "GKP" => Ok(Position::Gk),
            "DEF" => Ok(Position::Def),
            "MID" => Ok(Position::Mid),
            "FWD" => Ok(Position::Fwd),
            "AM" | "MNG" => Ok(Position::Am),
            other => Err(Error::UnknownPosition(other.to_string())),
        }
    }

    /// FPL `element_type` integer as served by the bootstrap endpoint.
    pub fn from_element_type(t: u8) -> Result<Position> {
        match t {
            1 => Ok(Position::Gk),
            2 => Ok(Position::Def),
            3 => Ok(Position::Mid),
            4 => Ok(Position::Fwd),
            5 => Ok(Position::Am),
            other => Err(Error::UnknownPosition(other.to_string())),
        }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Stable cross-season player identifier (opaque; lexicographic order is the
/// deterministic tie-break order).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlayerId(pub String);

impl PlayerId {
    pub fn new(id: impl Into<String>) -> Self {
        PlayerId(id.into())
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Canonical team name, the opaque team id used throughout (live ingest
/// resolves numeric FPL team ids to names before records leave the module).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TeamName(pub String);

impl TeamName {
    pub fn new(name: impl Into<String>) -> Self {
        TeamName(name.into())
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TeamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub type Season = String;

/// Player availability before a match, one of the five FPL categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Availability(u8);

impl Availability {
    pub const FULL: Availability = Availability(100);

    pub fn new(pct: u8) -> Result<Availability> {
        match pct {
            0 | 25 | 50 | 75 | 100 => Ok(Availability(pct)),
            other => Err(Error::InvalidAvailability(other.to_string())),
        }
    }

    pub fn pct(&self) -> u8 {
        self.0
    }

    /// Fraction in {0.0, 0.25, 0.5, 0.75, 1.0} used as the feature value.
    pub fn fraction(&self) -> f64 {
        f64::from(self.0) / 100.0
    }
}

/// One FPL player in one gameweek fixture, as ingested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawFplPlayerGw {
    pub player_id: PlayerId,
    pub player_name: String,
    pub position: Position,
    pub team: TeamName,
    pub opponent_team: TeamName,
    pub was_home: bool,
    pub gameweek: u8,
    pub season: Season,
    pub minutes: u16,
    pub total_points: i32,
    pub goals_scored: u32,
    pub assists: u32,
    pub goals_conceded: u32,
    pub own_goals: u32,
    pub saves: u32,
    pub penalties_saved: u32,
    pub penalties_missed: u32,
    pub yellow_cards: u32,
    pub red_cards: u32,
    pub bonus: u32,
    pub bps: i32,
    pub influence: f64,
    pub creativity: f64,
    pub threat: f64,
    pub availability: Availability,
}

/// One player's Understat line for one match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawUnderstatPlayerMatch {
    pub player_key: String,
    pub match_date: NaiveDate,
    pub shots: u32,
    pub xg: f64,
    pub xa: f64,
    pub xg_chain: f64,
    pub xg_buildup: f64,
    pub key_passes: u32,
}

/// One team's Understat line for one match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawUnderstatTeamMatch {
    pub team_key: String,
    pub match_date: NaiveDate,
    pub xg: f64,
    pub xga: f64,
    pub deep: u32,
    pub deep_allowed: u32,
    pub ppda_att: f64,
    pub ppda_def: f64,
    pub ppda_allowed_att: f64,
    pub ppda_allowed_def: f64,
    pub goals_scored: u32,
    pub goals_conceded: u32,
}

/// A scheduled (or played) fixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub season: Season,
    pub gameweek: u8,
    pub home_team: TeamName,
    pub away_team: TeamName,
    pub kickoff: DateTime<Utc>,
    pub deadline: DateTime<Utc>,
}

impl Fixture {
    pub fn involves(&self, team: &TeamName) -> bool {
        &self.home_team == team || &self.away_team == team
    }

    pub fn opponent_of(&self, team: &TeamName) -> Option<&TeamName> {
        if &self.home_team == team {
            Some(&self.away_team)
        } else if &self.away_team == team {
            Some(&self.home_team)
        } else {
            None
        }
    }
}

/// Player-level Understat involvement attached to a joined record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnderstatPlayerStats {
    pub shots: f64,
    pub xg: f64,
    pub xa: f64,
    pub xg_chain: f64,
    pub xg_buildup: f64,
    pub key_passes: f64,
}

impl UnderstatPlayerStats {
    pub const ZERO: UnderstatPlayerStats = UnderstatPlayerStats {
        shots: 0.0,
        xg: 0.0,
        xa: 0.0,
        xg_chain: 0.0,
        xg_buildup: 0.0,
        key_passes: 0.0,
    };

    pub fn from_raw(raw: &RawUnderstatPlayerMatch) -> Self {
        UnderstatPlayerStats {
            shots: f64::from(raw.shots),
            xg: raw.xg,
            xa: raw.xa,
            xg_chain: raw.xg_chain,
            xg_buildup: raw.xg_buildup,
            key_passes: f64::from(raw.key_passes),
        }
    }
}

/// Team-level match facts attached to a joined record (both own team and
/// opponent sides carry one).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeamMatchStats {
    pub goals_scored: f64,
    pub goals_conceded: f64,
    pub xg: f64,
    pub xga: f64,
    pub deep: f64,
    pub deep_allowed: f64,
    pub ppda_att: f64,
    pub ppda_def: f64,
    pub ppda_allowed_att: f64,
    pub ppda_allowed_def: f64,
}

impl TeamMatchStats {
    pub fn from_raw(raw: &RawUnderstatTeamMatch) -> Self {
        TeamMatchStats {
            goals_scored: f64::from(raw.goals_scored),
            goals_conceded: f64::from(raw.goals_conceded),
            xg: raw.xg,
            xga: raw.xga,
            deep: f64::from(raw.deep),
            deep_allowed: f64::from(raw.deep_allowed),
            ppda_att: raw.ppda_att,
            ppda_def: raw.ppda_def,
            ppda_allowed_att: raw.ppda_allowed_att,
            ppda_allowed_def: raw.ppda_allowed_def,
        }
    }
}

/// The atomic training/evaluation sample: one player in one fixture with
/// FPL and Understat facts joined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerMatchRecord {
    pub fpl: RawFplPlayerGw,
    pub kickoff: DateTime<Utc>,
    pub understat_player: Option<UnderstatPlayerStats>,
    pub team_match: TeamMatchStats,
    pub opponent_match: TeamMatchStats,
    pub imputed: bool,
}

impl PlayerMatchRecord {
    pub fn player_id(&self) -> &PlayerId {
        &self.fpl.player_id
    }
    pub fn team(&self) -> &TeamName {
        &self.fpl.team
    }
    pub fn opponent(&self) -> &TeamName {
        &self.fpl.opponent_team
    }
    pub fn season(&self) -> &str {
        &self.fpl.season
    }
    pub fn gameweek(&self) -> u8 {
        self.fpl.gameweek
    }

    /// Deterministic join key: one record per player per fixture side.
    pub fn join_key(&self) -> String {
        format!(
            "{}|{}|{}|{}|{}",
            self.fpl.season, self.fpl.gameweek, self.fpl.player_id, self.fpl.opponent_team, self.fpl.was_home
        )
    }
}

/// Everything loaded for one season before joining.
#[derive(Debug, Clone, Default)]
pub struct RawSeason {
    pub season: Season,
    pub fpl_rows: Vec<RawFplPlayerGw>,
    pub understat_players: Vec<RawUnderstatPlayerMatch>,
    pub understat_teams: Vec<RawUnderstatTeamMatch>,
    pub fixtures: Vec<Fixture>,
}
