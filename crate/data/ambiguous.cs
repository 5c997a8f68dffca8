# the same string matched by two branches
name: doubled;
sym a=1;
expr: (a|a)*;
