use std::fmt;

/// Facility state. The first three are the operational quality classes, ordered
/// from best to worst; the rest are absorbing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum State {
    /// No action indicated.
    N,
    /// Voluntary action indicated.
    V,
    /// Official action indicated.
    O,
    /// Manufacturing failure.
    D,
    /// Closed for non-mandatory maintenance.
    C,
    /// Inspected.
    I,
}

pub const ALL_STATES: [State; 6] = [State::N, State::V, State::O, State::D, State::C, State::I];
pub const OPERATIONAL: [State; 3] = [State::N, State::V, State::O];
pub const ABSORBING: [State; 3] = [State::D, State::C, State::I];

impl State {
    #[inline]
    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn from_index(i: usize) -> Option<State> {
        match i {
            0 => Some(State::N),
            1 => Some(State::V),
            2 => Some(State::O),
            3 => Some(State::D),
            4 => Some(State::C),
            5 => Some(State::I),
            _ => None,
        }
    }

    pub const fn is_operational(self) -> bool {
        matches!(self, State::N | State::V | State::O)
    }

    /// True for the two unexpected disruptive events.
    pub const fn is_disruptive(self) -> bool {
        matches!(self, State::D | State::C)
    }

    pub const fn label(self) -> &'static str {
        match self {
            State::N => "N",
            State::V => "V",
            State::O => "O",
            State::D => "D",
            State::C => "C",
            State::I => "I",
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}
