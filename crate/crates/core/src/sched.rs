//! Causality-enforcing discrete-event scheduler.
//!
//! Every message must be accepted by [`Scheduler::schedule`] before it can
//! be delivered, and acceptance requires the reception event to lie in the
//! closed future light cone of the emission event. Physically impossible
//! deliveries are refused with a [`SchedError::CausalityViolation`] naming
//! the offending pair, so no transcript produced by [`Scheduler::run`] can
//! contain a superluminal message.
//!
//! Simultaneous deliveries are ordered by insertion sequence, which makes a
//! full run a deterministic function of its inputs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::channels::{AgentId, Message};
use crate::spacetime::{causally_precedes, Event};

#[derive(Debug, Error, PartialEq)]
pub enum SchedError {
    #[error("causality violation: emission {emission} cannot reach reception {reception}")]
    CausalityViolation { emission: Event, reception: Event },
    #[error("message endpoints must be finite events")]
    NonFiniteEndpoint,
    #[error("no agent registered for {target}")]
    UnknownAgent { target: AgentId },
    #[error("agent {agent} failed at t={time}: {reason}")]
    AgentFailure {
        agent: AgentId,
        time: f64,
        reason: String,
    },
    #[error("agent {agent} emitted at t={emitted} before its delivery at t={delivered}")]
    EmissionBeforeDelivery {
        agent: AgentId,
        emitted: f64,
        delivered: f64,
    },
}

/// A queued delivery, popped in (time, sequence) order.
#[derive(Debug, Clone)]
pub struct ScheduledEvent {
    pub time: f64,
    pub sequence: u64,
    pub target: AgentId,
    pub message: Message,
}

impl PartialEq for ScheduledEvent {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time && self.sequence == other.sequence
    }
}

impl Eq for ScheduledEvent {}

impl Ord for ScheduledEvent {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we pop the earliest delivery.
        other
            .time
            .total_cmp(&self.time)
            .then(other.sequence.cmp(&self.sequence))
    }
}

impl PartialOrd for ScheduledEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Static laboratory anchor of one agent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentAnchor {
    pub id: AgentId,
    pub position: [f64; 3],
}

/// An agent driven by the scheduler. Delivery hands the agent a message
/// and the coordinate time of its reception; the agent may emit further
/// messages, each of which goes back through the causal gate.
pub trait Agent {
    fn id(&self) -> AgentId;
    fn on_message(&mut self, message: &Message, now: f64) -> Result<Vec<Message>, String>;
}

#[derive(Debug, Default)]
pub struct Scheduler {
    queue: BinaryHeap<ScheduledEvent>,
    next_sequence: u64,
}

impl Scheduler {
    pub fn new() -> Self {
        Scheduler::default()
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }

    /// The causal gate, shared with post-hoc auditing: a message is
    /// deliverable iff its reception lies in the closed future cone of its
    /// emission.
    pub fn admissible(message: &Message) -> Result<(), SchedError> {
        if !message.emission.is_finite() || !message.reception.is_finite() {
            return Err(SchedError::NonFiniteEndpoint);
        }
        if !causally_precedes(message.emission, message.reception) {
            return Err(SchedError::CausalityViolation {
                emission: message.emission,
                reception: message.reception,
            });
        }
        Ok(())
    }

    /// Accept a message for delivery or refuse it as physically impossible.
    pub fn schedule(&mut self, message: Message) -> Result<(), SchedError> {
        Self::admissible(&message)?;
        let event = ScheduledEvent {
            time: message.reception.t,
            sequence: self.next_sequence,
            target: message.receiver,
            message,
        };
        self.next_sequence += 1;
        self.queue.push(event);
        Ok(())
    }

    /// Process the queue to exhaustion, delivering each message to its
    /// target agent and scheduling whatever the agent emits. Returns the
    /// delivered messages in delivery order.
    pub fn run(&mut self, agents: &mut [&mut dyn Agent]) -> Result<Vec<Message>, SchedError> {
        let mut log = Vec::new();
        while let Some(event) = self.queue.pop() {
            let agent = agents
                .iter_mut()
                .find(|a| a.id() == event.target)
                .ok_or(SchedError::UnknownAgent {
                    target: event.target,
                })?;
            let emitted = agent
                .on_message(&event.message, event.time)
                .map_err(|reason| SchedError::AgentFailure {
                    agent: event.target,
                    time: event.time,
                    reason,
                })?;
            for message in emitted {
                // A reaction cannot leave before the triggering delivery.
                if message.emission.t < event.time {
                    return Err(SchedError::EmissionBeforeDelivery {
                        agent: event.target,
                        emitted: message.emission.t,
                        delivered: event.time,
                    });
                }
                self.schedule(message)?;
            }
            log.push(event.message);
        }
        Ok(log)
    }
}

/// Re-check every message of a finished run against the causal gate,
/// independently of the insertion-time enforcement.
pub fn audit_messages<'a>(messages: impl IntoIterator<Item = &'a Message>) -> Result<(), SchedError> {
    for message in messages {
        Scheduler::admissible(message)?;
    }
    Ok(())
}
