//! In-memory session store keyed by random tokens.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant, SystemTime};

use rand::Rng;
use stepwise_engine::Session;

use crate::error::ApiError;

pub struct Entry {
    /// Serialises all requests against one session.
    pub session: tokio::sync::Mutex<Session>,
    pub created: SystemTime,
    last_used: Mutex<Instant>,
}

impl Entry {
    fn idle_for(&self, now: Instant) -> Duration {
        now.saturating_duration_since(*self.last_used.lock().unwrap())
    }
}

pub struct Registry {
    sessions: RwLock<HashMap<String, Arc<Entry>>>,
    idle_expiry: Duration,
}

/// 128 random bits from the thread-local CSPRNG, as 32 hex digits.
pub fn new_token() -> String {
    format!("{:032x}", rand::rng().random::<u128>())
}

impl Registry {
    pub fn new(idle_expiry: Duration) -> Self {
        Registry {
            sessions: RwLock::new(HashMap::new()),
            idle_expiry,
        }
    }

    pub fn insert(&self, session: Session) -> String {
        let now = Instant::now();
        let entry = Arc::new(Entry {
            session: tokio::sync::Mutex::new(session),
            created: SystemTime::now(),
            last_used: Mutex::new(now),
        });
        let mut map = self.sessions.write().unwrap();
        map.retain(|_, e| e.idle_for(now) < self.idle_expiry);
        loop {
            let token = new_token();
            if !map.contains_key(&token) {
                map.insert(token.clone(), entry);
                return token;
            }
        }
    }

    /// Looks a session up and marks it used. Sessions idle for longer than
    /// the expiry are dropped here rather than by a background sweeper.
    pub fn get(&self, token: &str) -> Result<Arc<Entry>, ApiError> {
        let now = Instant::now();
        let entry = self.sessions.read().unwrap().get(token).cloned();
        let missing = || ApiError::not_found(format!("unknown session `{token}`"));
        let entry = entry.ok_or_else(missing)?;
        if entry.idle_for(now) >= self.idle_expiry {
            self.sessions.write().unwrap().remove(token);
            return Err(missing());
        }
        *entry.last_used.lock().unwrap() = now;
        Ok(entry)
    }

    pub fn len(&self) -> usize {
        self.sessions.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn entries(&self) -> Vec<(String, Arc<Entry>)> {
        let mut all: Vec<_> = self
            .sessions
            .read()
            .unwrap()
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        all.sort_by(|a, b| a.0.cmp(&b.0));
        all
    }
}
