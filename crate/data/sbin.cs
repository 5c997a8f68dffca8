# unconstrained binary channel
name: S_bin;
sym 0=1 1=1;
expr: (0|1)*;
