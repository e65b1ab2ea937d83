//! Experiment files shipped with the crate.

macro_rules! presets {
    ($($name:literal),* $(,)?) => {
        /// `(name, file contents)` of every shipped preset.
        pub const PRESETS: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../../presets/", $name, ".toml"))),)*
        ];
    };
}

presets!(
    "fig4",
    "fig5a",
    "fig5a-full",
    "fig5b",
    "fig5b-full",
    "fig5c",
    "fig5c-full",
    "fig5d",
    "fig5d-full",
    "fig6a",
    "fig6a-full",
    "fig6b",
    "fig6b-full",
    "fig7a",
    "fig7a-full",
    "fig7b",
    "fig7b-full",
    "table2",
    "table2-full",
    "table2-n5",
    "table2-n5-full",
    "smoke",
    "table1-m1",
    "table1-m2",
    "table1-m3",
    "table1-m4",
    "table3-m2",
    "table3-m3",
    "table3-m4",
    "table3-m2-n05",
    "table3-m3-n05",
    "table3-m4-n05",
);

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}
