package chain;

public class A {
}
