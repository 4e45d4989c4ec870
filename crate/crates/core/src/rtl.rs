//! Structural VHDL emission.
//!
//! The generated text contains the storage templates that the design uses,
//! one top-level entity instantiating them, input/output multiplexers, and a
//! cycle-counter controller whose case statement replays the control table.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::architecture::{ControlAction, StarArchitecture};
use crate::element::StorageKind;
use crate::ids::{Cycle, PortId, StorageId};
use crate::schedule::Direction;

const RESERVED: &[&str] = &[
    "abs",
    "and",
    "architecture",
    "begin",
    "block",
    "buffer",
    "case",
    "component",
    "constant",
    "else",
    "end",
    "entity",
    "for",
    "generic",
    "if",
    "in",
    "inout",
    "is",
    "library",
    "loop",
    "map",
    "mod",
    "not",
    "of",
    "or",
    "others",
    "out",
    "port",
    "process",
    "range",
    "rem",
    "select",
    "signal",
    "then",
    "to",
    "type",
    "use",
    "when",
    "with",
    "xor",
];

fn ident(raw: &str) -> String {
    let mut s: String =
        raw.chars().map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' }).collect();
    if !s.starts_with(|c: char| c.is_ascii_alphabetic()) {
        s.insert_str(0, "x_");
    }
    while s.contains("__") {
        s = s.replace("__", "_");
    }
    if s.ends_with('_') {
        s.push('x');
    }
    if RESERVED.contains(&s.as_str()) {
        s.push_str("_p");
    }
    s
}

const FIFO_TEMPLATE: &str = "\
library ieee;
use ieee.std_logic_1164.all;

entity star_fifo is
  generic (WIDTH : positive; DEPTH : positive);
  port (
    clk  : in  std_logic;
    rst  : in  std_logic;
    push : in  std_logic;
    pop  : in  std_logic;
    din  : in  std_logic_vector(WIDTH-1 downto 0);
    dout : out std_logic_vector(WIDTH-1 downto 0)
  );
end entity star_fifo;

architecture rtl of star_fifo is
  type mem_t is array (0 to DEPTH-1) of std_logic_vector(WIDTH-1 downto 0);
  signal mem  : mem_t;
  signal head : natural range 0 to DEPTH-1 := 0;
  signal tail : natural range 0 to DEPTH-1 := 0;
begin
  dout <= mem(head);
  process (clk)
  begin
    if rising_edge(clk) then
      if rst = '1' then
        head <= 0;
        tail <= 0;
      else
        if pop = '1' then
          head <= (head + 1) mod DEPTH;
        end if;
        if push = '1' then
          mem(tail) <= din;
          tail <= (tail + 1) mod DEPTH;
        end if;
      end if;
    end if;
  end process;
end architecture rtl;
";

const LIFO_TEMPLATE: &str = "\
library ieee;
use ieee.std_logic_1164.all;

entity star_lifo is
  generic (WIDTH : positive; DEPTH : positive);
  port (
    clk  : in  std_logic;
    rst  : in  std_logic;
    push : in  std_logic;
    pop  : in  std_logic;
    din  : in  std_logic_vector(WIDTH-1 downto 0);
    dout : out std_logic_vector(WIDTH-1 downto 0)
  );
end entity star_lifo;

architecture rtl of star_lifo is
  type mem_t is array (0 to DEPTH-1) of std_logic_vector(WIDTH-1 downto 0);
  signal mem : mem_t;
  signal sp  : natural range 0 to DEPTH := 0;
begin
  dout <= mem(sp - 1) when sp > 0 else (others => '0');
  process (clk)
  begin
    if rising_edge(clk) then
      if rst = '1' then
        sp <= 0;
      elsif pop = '1' and push = '1' then
        mem(sp - 1) <= din;
      elsif pop = '1' then
        sp <= sp - 1;
      elsif push = '1' then
        mem(sp) <= din;
        sp <= sp + 1;
      end if;
    end if;
  end process;
end architecture rtl;
";

const REG_TEMPLATE: &str = "\
library ieee;
use ieee.std_logic_1164.all;

entity star_reg is
  generic (WIDTH : positive);
  port (
    clk  : in  std_logic;
    load : in  std_logic;
    din  : in  std_logic_vector(WIDTH-1 downto 0);
    dout : out std_logic_vector(WIDTH-1 downto 0)
  );
end entity star_reg;

architecture rtl of star_reg is
begin
  process (clk)
  begin
    if rising_edge(clk) then
      if load = '1' then
        dout <= din;
      end if;
    end if;
  end process;
end architecture rtl;
";

fn template(kind: StorageKind) -> &'static str {
    match kind {
        StorageKind::Fifo => FIFO_TEMPLATE,
        StorageKind::Lifo => LIFO_TEMPLATE,
        StorageKind::Register => REG_TEMPLATE,
    }
}

fn entity_name(kind: StorageKind) -> &'static str {
    match kind {
        StorageKind::Fifo => "star_fifo",
        StorageKind::Lifo => "star_lifo",
        StorageKind::Register => "star_reg",
    }
}

pub fn emit_rtl(a: &StarArchitecture) -> String {
    let top = format!("star_{}", ident(a.name.as_deref().unwrap_or("adapter")));
    let mut out = String::new();
    let _ = writeln!(out, "-- Space-time adapter `{top}`: generated, do not edit.");
    out.push('\n');

    let kinds: BTreeSet<StorageKind> = a.storages.iter().map(|s| s.kind).collect();
    for k in &kinds {
        out.push_str(template(*k));
        out.push('\n');
    }

    // Sources per storage and per output port, in interconnect order.
    let mut sources: BTreeMap<&StorageId, Vec<&PortId>> = BTreeMap::new();
    let mut drivers: BTreeMap<&PortId, Vec<&StorageId>> = BTreeMap::new();
    for l in &a.interconnect {
        match l.dir {
            Direction::Input => sources.entry(&l.storage).or_default().push(&l.port),
            Direction::Output => drivers.entry(&l.port).or_default().push(&l.storage),
        }
    }
    let width_of = |p: &PortId| a.ports.iter().find(|x| &x.id == p).map_or(1, |x| x.width);
    let last_cycle = a.control.iter().map(|op| op.cycle).max().unwrap_or(0);

    out.push_str("library ieee;\nuse ieee.std_logic_1164.all;\nuse ieee.numeric_std.all;\n\n");
    let _ = writeln!(out, "entity {top} is");
    out.push_str("  port (\n    clk : in std_logic;\n    rst : in std_logic");
    for p in &a.ports {
        let dir = match p.dir {
            Direction::Input => "in ",
            Direction::Output => "out",
        };
        let _ =
            write!(out, ";\n    {} : {dir} std_logic_vector({} downto 0)", ident(p.id.as_str()), p.width - 1);
    }
    out.push_str("\n  );\n");
    let _ = writeln!(out, "end entity {top};\n");

    let _ = writeln!(out, "architecture structural of {top} is");
    for k in &kinds {
        let name = entity_name(*k);
        let generics = if *k == StorageKind::Register {
            "WIDTH : positive"
        } else {
            "WIDTH : positive; DEPTH : positive"
        };
        let _ = writeln!(out, "  component {name} is");
        let _ = writeln!(out, "    generic ({generics});");
        match k {
            StorageKind::Register => out.push_str(
                "    port (clk, load : in std_logic; din : in std_logic_vector(WIDTH-1 downto 0); dout : out std_logic_vector(WIDTH-1 downto 0));\n",
            ),
            _ => out.push_str(
                "    port (clk, rst, push, pop : in std_logic; din : in std_logic_vector(WIDTH-1 downto 0); dout : out std_logic_vector(WIDTH-1 downto 0));\n",
            ),
        }
        out.push_str("  end component;\n");
    }
    let _ = writeln!(out, "  signal cycle : natural range 0 to {} := 0;", last_cycle + 1);
    for s in &a.storages {
        let id = ident(s.id.as_str());
        let strobes = match s.kind {
            StorageKind::Register => format!("{id}_load"),
            _ => format!("{id}_push, {id}_pop"),
        };
        let _ = writeln!(out, "  signal {strobes} : std_logic;");
        let _ = writeln!(out, "  signal {id}_din, {id}_dout : std_logic_vector({} downto 0);", s.width - 1);
        let n = sources.get(&s.id).map_or(0, Vec::len);
        let _ = writeln!(out, "  signal {id}_sel : natural range 0 to {};", n.max(1) - 1);
    }
    for (p, ds) in &drivers {
        let _ =
            writeln!(out, "  signal {}_sel : natural range 0 to {};", ident(p.as_str()), ds.len().max(1) - 1);
    }
    out.push_str("begin\n");

    for s in &a.storages {
        let id = ident(s.id.as_str());
        let name = entity_name(s.kind);
        match s.kind {
            StorageKind::Register => {
                let _ = writeln!(out, "  {id}_i : {name} generic map (WIDTH => {})", s.width);
                let _ = writeln!(
                    out,
                    "    port map (clk => clk, load => {id}_load, din => {id}_din, dout => {id}_dout);"
                );
            }
            _ => {
                let _ = writeln!(
                    out,
                    "  {id}_i : {name} generic map (WIDTH => {}, DEPTH => {})",
                    s.width, s.capacity
                );
                let _ = writeln!(
                    out,
                    "    port map (clk => clk, rst => rst, push => {id}_push, pop => {id}_pop, din => {id}_din, dout => {id}_dout);"
                );
            }
        }
    }
    out.push('\n');

    out.push_str("  -- input interconnect\n");
    for s in &a.storages {
        let id = ident(s.id.as_str());
        let _ = writeln!(out, "  with {id}_sel select {id}_din <=");
        for (i, p) in sources.get(&s.id).into_iter().flatten().enumerate() {
            let _ = writeln!(
                out,
                "    std_logic_vector(resize(unsigned({}), {})) when {i},",
                ident(p.as_str()),
                s.width
            );
        }
        out.push_str("    (others => '0') when others;\n");
    }
    out.push_str("  -- output interconnect\n");
    for (p, ds) in &drivers {
        let pid = ident(p.as_str());
        let w = width_of(p);
        let _ = writeln!(out, "  with {pid}_sel select {pid} <=");
        for (i, st) in ds.iter().enumerate() {
            let _ = writeln!(
                out,
                "    std_logic_vector(resize(unsigned({}_dout), {w})) when {i},",
                ident(st.as_str())
            );
        }
        out.push_str("    (others => '0') when others;\n");
    }
    out.push('\n');

    out.push_str("  counter : process (clk)\n  begin\n    if rising_edge(clk) then\n");
    out.push_str("      if rst = '1' then\n        cycle <= 0;\n");
    let _ = writeln!(out, "      elsif cycle <= {last_cycle} then\n        cycle <= cycle + 1;");
    out.push_str("      end if;\n    end if;\n  end process;\n\n");

    out.push_str("  control : process (cycle)\n  begin\n");
    for s in &a.storages {
        let id = ident(s.id.as_str());
        match s.kind {
            StorageKind::Register => {
                let _ = writeln!(out, "    {id}_load <= '0';");
            }
            _ => {
                let _ = writeln!(out, "    {id}_push <= '0';");
                let _ = writeln!(out, "    {id}_pop <= '0';");
            }
        }
        let _ = writeln!(out, "    {id}_sel <= 0;");
    }
    for p in drivers.keys() {
        let _ = writeln!(out, "    {}_sel <= 0;", ident(p.as_str()));
    }
    out.push_str("    case cycle is\n");
    let mut by_cycle: BTreeMap<Cycle, Vec<String>> = BTreeMap::new();
    for op in &a.control {
        let id = ident(op.storage.as_str());
        let lines = by_cycle.entry(op.cycle).or_default();
        if op.action.is_write() {
            let sel = sources[&op.storage].iter().position(|p| **p == op.port).unwrap_or(0);
            let strobe = if op.action == ControlAction::Load { "load" } else { "push" };
            lines.push(format!(
                "{id}_{strobe} <= '1'; {id}_sel <= {sel}; -- {} {}",
                op.action.as_str(),
                op.data
            ));
        } else {
            let sel = drivers[&op.port].iter().position(|s| **s == op.storage).unwrap_or(0);
            let pop =
                if op.action == ControlAction::Pop { format!(" {id}_pop <= '1';") } else { String::new() };
            lines.push(format!(
                "{}_sel <= {sel};{pop} -- {} {}",
                ident(op.port.as_str()),
                op.action.as_str(),
                op.data
            ));
        }
    }
    for (cycle, lines) in &by_cycle {
        let _ = writeln!(out, "      when {cycle} =>");
        for l in lines {
            let _ = writeln!(out, "        {l}");
        }
    }
    out.push_str("      when others =>\n        null;\n    end case;\n  end process;\n");
    out.push_str("end architecture structural;\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identifiers_are_legal() {
        assert_eq!(ident("in"), "in_p");
        assert_eq!(ident("0bus"), "x_0bus");
        assert_eq!(ident("a--b"), "a_b");
        assert_eq!(ident("Out0"), "out0");
    }
}
