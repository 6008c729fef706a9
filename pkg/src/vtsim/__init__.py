# vtsim: two-timescale transcoding cluster simulator
