//! Live games with concrete numbers: one human against the bot, or two
//! humans sharing a screen.
//!
//! Every accepted move is recorded as an [`Event`]; the event list is the
//! source of truth and replays to the board exactly. Sessions can append
//! their events to a JSON-lines file as they happen.

use std::collections::{BTreeSet, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{residue_of, BoardState, GameConfig, GameError, GameOutcome, Player};
use crate::registry::is_playable_vs_bot;
use crate::strategy::Strategy;
use crate::strategy_b::{Bot, BotProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// The human plays `A`, the bot answers as `B`.
    VsBot,
    /// Both sides are human.
    HotSeat,
}

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("invalid configuration Z({n}, {d}): need n >= 4 and d >= 2")]
    InvalidConfig { n: u32, d: u32 },
    #[error("{config} is not offered against the bot")]
    UnknownVariant { config: GameConfig },
    #[error("{number} is not on the board")]
    IllegalMove { number: u32 },
    #[error("it is {to_move}'s turn")]
    NotYourTurn { to_move: Player },
    #[error("the game is over")]
    SessionFinished,
    #[error("no session {0}")]
    SessionNotFound(String),
    #[error("event log: {0}")]
    Log(#[from] io::Error),
    #[error("event log line {line}: {reason}")]
    CorruptLog { line: usize, reason: String },
}

/// One crossed-out number. `ts` is milliseconds since the Unix epoch and is
/// informational only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    pub actor: Player,
    pub number: u32,
    pub residue: u32,
    pub ts: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    InProgress,
    Finished(GameOutcome),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigView {
    pub n: u32,
    pub d: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumberView {
    pub number: u32,
    pub residue: u32,
    pub crossed_by: Option<Player>,
    pub superfluous: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossedView {
    pub actor: Player,
    pub number: u32,
}

/// Everything a client needs to draw the board.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub config: ConfigView,
    pub mode: Mode,
    pub live: Vec<u32>,
    pub numbers: Vec<NumberView>,
    pub crossed: Vec<CrossedView>,
    pub to_move: Option<Player>,
    /// `"in_progress"` or `"finished"`.
    pub status: String,
    pub winner: Option<Player>,
    pub final_pair: Option<[u32; 2]>,
}

fn now_millis() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

#[derive(Debug)]
pub struct Session {
    id: String,
    config: GameConfig,
    mode: Mode,
    board: BoardState,
    bot: Option<Bot>,
    events: Vec<Event>,
    log: Option<File>,
}

impl Session {
    /// A fresh game. Against the bot only registry variants are allowed.
    pub fn create(
        id: impl Into<String>,
        config: GameConfig,
        mode: Mode,
        seed: u64,
    ) -> Result<Self, SessionError> {
        if mode == Mode::VsBot && !is_playable_vs_bot(&config) {
            return Err(SessionError::UnknownVariant { config });
        }
        Ok(Self {
            id: id.into(),
            config,
            mode,
            board: BoardState::new(config),
            bot: (mode == Mode::VsBot).then(|| Bot::punisher(seed)),
            events: Vec::new(),
            log: None,
        })
    }

    /// Appends every event, past and future, to `path`.
    pub fn attach_log(&mut self, path: &Path) -> Result<(), SessionError> {
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        for event in &self.events {
            write_event(&mut file, event)?;
        }
        self.log = Some(file);
        Ok(())
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn config(&self) -> GameConfig {
        self.config
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn board(&self) -> &BoardState {
        &self.board
    }

    pub fn bot_profile(&self) -> Option<BotProfile> {
        self.bot.as_ref().map(Bot::profile)
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn status(&self) -> Status {
        match self.board.terminal_outcome() {
            Some(outcome) => Status::Finished(outcome),
            None => Status::InProgress,
        }
    }

    /// Crosses out `number` for the player on turn and, against the bot,
    /// plays the bot's reply. `as_player`, when given, must be the player on
    /// turn. Returns the new events.
    pub fn submit_move(
        &mut self,
        number: u32,
        as_player: Option<Player>,
    ) -> Result<Vec<Event>, SessionError> {
        if self.board.is_terminal() {
            return Err(SessionError::SessionFinished);
        }
        let to_move = self.board.to_move();
        let human_seat = match self.mode {
            Mode::VsBot => Player::A,
            Mode::HotSeat => to_move,
        };
        if to_move != human_seat || as_player.is_some_and(|p| p != to_move) {
            return Err(SessionError::NotYourTurn { to_move });
        }
        let first = self.apply(number)?;
        let mut new = vec![first];
        if let Some(bot) = self.bot.as_mut() {
            if !self.board.is_terminal() {
                let reply = bot
                    .next_move(&self.board)
                    .expect("the bot always has a move on its turn");
                new.push(self.apply(reply)?);
            }
        }
        Ok(new)
    }

    fn apply(&mut self, number: u32) -> Result<Event, SessionError> {
        let actor = self.board.to_move();
        self.board.remove(number).map_err(|e| match e {
            GameError::GameOver => SessionError::SessionFinished,
            _ => SessionError::IllegalMove { number },
        })?;
        let event = Event {
            seq: self.events.len() as u64,
            actor,
            number,
            residue: residue_of(number, self.config.d()),
            ts: now_millis(),
        };
        if let Some(file) = self.log.as_mut() {
            write_event(file, &event)?;
        }
        self.events.push(event.clone());
        Ok(event)
    }

    pub fn view(&self) -> SessionView {
        let d = self.config.d();
        let superfluous = if self.board.live().len() >= 2 {
            self.board.superfluous_numbers()
        } else {
            BTreeSet::new()
        };
        let crossed_by: HashMap<u32, Player> = self
            .board
            .removed()
            .iter()
            .map(|m| (m.number, m.player))
            .collect();
        let numbers = (1..=self.config.n())
            .map(|a| NumberView {
                number: a,
                residue: residue_of(a, d),
                crossed_by: crossed_by.get(&a).copied(),
                superfluous: superfluous.contains(&a),
            })
            .collect();
        let (status, to_move, winner, final_pair) = match self.status() {
            Status::InProgress => ("in_progress", Some(self.board.to_move()), None, None),
            Status::Finished(o) => (
                "finished",
                None,
                Some(o.winner),
                Some([o.final_pair.0, o.final_pair.1]),
            ),
        };
        SessionView {
            id: self.id.clone(),
            config: ConfigView {
                n: self.config.n(),
                d,
            },
            mode: self.mode,
            live: self.board.live().iter().copied().collect(),
            numbers,
            crossed: self
                .board
                .removed()
                .iter()
                .map(|m| CrossedView {
                    actor: m.player,
                    number: m.number,
                })
                .collect(),
            to_move,
            status: status.to_string(),
            winner,
            final_pair,
        }
    }
}

fn write_event(out: &mut impl Write, event: &Event) -> io::Result<()> {
    let line = serde_json::to_string(event).map_err(io::Error::other)?;
    writeln!(out, "{line}")?;
    out.flush()
}

/// Rebuilds the board from an event list, checking sequence numbers,
/// actors and residues along the way.
pub fn replay_events(config: GameConfig, events: &[Event]) -> Result<BoardState, SessionError> {
    let mut board = BoardState::new(config);
    for (i, event) in events.iter().enumerate() {
        let corrupt = |reason: String| SessionError::CorruptLog {
            line: i + 1,
            reason,
        };
        if event.seq != i as u64 {
            return Err(corrupt(format!("expected seq {i}, found {}", event.seq)));
        }
        if event.actor != board.to_move() {
            return Err(corrupt(format!("{} moved out of turn", event.actor)));
        }
        if event.residue != residue_of(event.number, config.d()) {
            return Err(corrupt(format!("wrong residue for {}", event.number)));
        }
        board
            .remove(event.number)
            .map_err(|e| corrupt(e.to_string()))?;
    }
    Ok(board)
}

pub fn read_event_log(path: &Path) -> Result<Vec<Event>, SessionError> {
    let reader = BufReader::new(File::open(path)?);
    let mut events = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let event = serde_json::from_str(&line).map_err(|e| SessionError::CorruptLog {
            line: i + 1,
            reason: e.to_string(),
        })?;
        events.push(event);
    }
    Ok(events)
}

/// All live sessions of a process.
///
/// The map lock is held only to look a session up or insert one; each
/// session has its own mutex, so moves in different games never wait on
/// each other.
#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    log_dir: Option<PathBuf>,
}

impl SessionStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sessions created by this store write `<id>.jsonl` into `dir`.
    pub fn with_log_dir(dir: impl Into<PathBuf>) -> Self {
        Self {
            sessions: RwLock::default(),
            log_dir: Some(dir.into()),
        }
    }

    /// Creates a session. Without a seed one is drawn at random.
    pub fn create(
        &self,
        n: u32,
        d: u32,
        mode: Mode,
        seed: Option<u64>,
    ) -> Result<SessionView, SessionError> {
        let config = GameConfig::new(n, d).map_err(|_| SessionError::InvalidConfig { n, d })?;
        let id = format!("{:032x}", rand::rng().random::<u128>());
        let seed = seed.unwrap_or_else(|| rand::rng().random());
        let mut session = Session::create(id.clone(), config, mode, seed)?;
        if let Some(dir) = &self.log_dir {
            session.attach_log(&dir.join(format!("{id}.jsonl")))?;
        }
        let view = session.view();
        self.sessions
            .write()
            .expect("session map poisoned")
            .insert(id, Arc::new(Mutex::new(session)));
        Ok(view)
    }

    fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>, SessionError> {
        self.sessions
            .read()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::SessionNotFound(id.to_string()))
    }

    pub fn view(&self, id: &str) -> Result<SessionView, SessionError> {
        Ok(self.get(id)?.lock().expect("session poisoned").view())
    }

    pub fn submit_move(
        &self,
        id: &str,
        number: u32,
        as_player: Option<Player>,
    ) -> Result<(Vec<Event>, SessionView), SessionError> {
        let session = self.get(id)?;
        let mut session = session.lock().expect("session poisoned");
        let events = session.submit_move(number, as_player)?;
        Ok((events, session.view()))
    }

    pub fn events(&self, id: &str) -> Result<Vec<Event>, SessionError> {
        Ok(self
            .get(id)?
            .lock()
            .expect("session poisoned")
            .events()
            .to_vec())
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("session map poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: u32, d: u32) -> GameConfig {
        GameConfig::new(n, d).unwrap()
    }

    #[test]
    fn create_rules() {
        let s = Session::create("x", cfg(15, 7), Mode::VsBot, 1).unwrap();
        assert_eq!(s.board().live().len(), 15);
        assert_eq!(s.view().to_move, Some(Player::A));
        assert!(matches!(
            Session::create("x", cfg(14, 7), Mode::VsBot, 1),
            Err(SessionError::UnknownVariant { .. })
        ));
        assert!(Session::create("x", cfg(15, 9), Mode::HotSeat, 1).is_ok());
        assert!(matches!(
            SessionStore::new().create(3, 7, Mode::HotSeat, None),
            Err(SessionError::InvalidConfig { n: 3, d: 7 })
        ));
    }

    #[test]
    fn bot_replies_in_the_same_call() {
        let mut s = Session::create("x", cfg(15, 7), Mode::VsBot, 1).unwrap();
        let events = s.submit_move(1, None).unwrap();
        assert_eq!(events.len(), 2);
        assert_eq!(events[0].actor, Player::A);
        assert_eq!(events[1].actor, Player::B);
        assert_eq!(events[1].seq, 1);
        assert!(matches!(
            s.submit_move(1, None),
            Err(SessionError::IllegalMove { number: 1 })
        ));
        assert!(matches!(
            s.submit_move(2, Some(Player::B)),
            Err(SessionError::NotYourTurn { .. })
        ));
    }

    #[test]
    fn hot_seat_alternates() {
        let mut s = Session::create("x", cfg(15, 9), Mode::HotSeat, 0).unwrap();
        for number in [9, 8, 1, 7, 2] {
            assert_eq!(s.submit_move(number, None).unwrap().len(), 1);
        }
        let view = s.view();
        let flagged: Vec<u32> = view
            .numbers
            .iter()
            .filter(|v| v.superfluous)
            .map(|v| v.number)
            .collect();
        assert_eq!(flagged, vec![10, 11]);
        assert_eq!(view.to_move, Some(Player::B));
        assert_eq!(
            view.crossed[1],
            CrossedView {
                actor: Player::B,
                number: 8
            }
        );
    }

    #[test]
    fn fresh_view_shows_residues() {
        let view = Session::create("x", cfg(15, 7), Mode::VsBot, 1)
            .unwrap()
            .view();
        let residues: Vec<u32> = view.numbers.iter().map(|v| v.residue).collect();
        assert_eq!(residues, vec![1, 2, 3, 4, 5, 6, 0, 1, 2, 3, 4, 5, 6, 0, 1]);
        assert_eq!(view.status, "in_progress");
    }

    #[test]
    fn finished_games_reject_moves() {
        let mut s = Session::create("x", cfg(5, 2), Mode::HotSeat, 0).unwrap();
        for number in [1, 2, 3] {
            s.submit_move(number, None).unwrap();
        }
        let view = s.view();
        assert_eq!(view.status, "finished");
        assert_eq!(view.final_pair, Some([4, 5]));
        assert_eq!(view.winner, Some(Player::B));
        assert_eq!(view.to_move, None);
        assert!(matches!(
            s.submit_move(4, None),
            Err(SessionError::SessionFinished)
        ));
    }

    #[test]
    fn event_log_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store = SessionStore::with_log_dir(dir.path());
        let id = store.create(15, 7, Mode::VsBot, Some(5)).unwrap().id;
        for number in [1, 3, 5] {
            if store.view(&id).unwrap().live.contains(&number) {
                store.submit_move(&id, number, None).unwrap();
            }
        }
        let logged = read_event_log(&dir.path().join(format!("{id}.jsonl"))).unwrap();
        assert_eq!(logged, store.events(&id).unwrap());
        let board = replay_events(cfg(15, 7), &logged).unwrap();
        assert_eq!(
            board.live().iter().copied().collect::<Vec<_>>(),
            store.view(&id).unwrap().live
        );
    }

    #[test]
    fn unknown_sessions() {
        let store = SessionStore::new();
        assert!(matches!(
            store.view("nope"),
            Err(SessionError::SessionNotFound(_))
        ));
        assert!(store.is_empty());
    }
}
