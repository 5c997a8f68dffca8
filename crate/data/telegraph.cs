# dot, dash and the gaps between them, weighted by duration
name: telegraph;
sym dot=2 dash=4 gap=3 space=6;
expr: ((dot|dash) gap)* (dot|dash) (space ((dot|dash) gap)* (dot|dash))*;
